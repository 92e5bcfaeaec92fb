#include "support.hpp"

#include "ovalspec/analysis.hpp"
#include "ovalspec/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ovalspec;
using testsupport::kPi;

namespace {

CurveSpec clustered() { return build_curve({{3, 0.04, 0.0}, {5, 0.06, 0.0}, {7, 0.03, 0.0}}); }

} // namespace

TEST_CASE("critical angles of simple curves") {
    const auto circle = critical_angles(split_fg(CurveSpec{}));
    CHECK(circle.f_identically_zero);
    CHECK(circle.angles.empty());
    CHECK(check_lemma1(circle).pass);
    CHECK(max_circular_gap(circle).theorem2_applicable);

    // g-only curve: f == 0 as well.
    CHECK(critical_angles(split_fg(build_curve({{2, 0.0, 0.2}}))).f_identically_zero);

    const auto a3 = critical_angles(split_fg(build_curve({{3, 0.1, 0.0}})));
    REQUIRE(a3.angles.size() == 6);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(a3.angles[k] - k * kPi / 3) < 1e-12);
    CHECK(a3.sign_change_count() == 6);
    const GapResult g3 = max_circular_gap(a3);
    CHECK(g3.gap == doctest::Approx(kPi / 3).epsilon(1e-12));
    CHECK(g3.theorem2_applicable);

    const auto a5 = critical_angles(split_fg(build_curve({{5, 0.01, 0.0}})));
    CHECK(a5.sign_change_count() == 10);
    CHECK(check_lemma1(a5).sign_changing_angles == 10);
    CHECK(check_lemma1(a5).critical_points == 10);
}

TEST_CASE("clustered zeros leave a wide gap") {
    const auto set = critical_angles(split_fg(clustered()));
    const double expected[6] = {0.0, 0.652832, 2.488761, kPi, 3.794425, 5.630353};
    REQUIRE(set.angles.size() == 6);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(set.angles[k] - expected[k]) < 1e-6);
    const GapResult gap = max_circular_gap(set);
    CHECK(gap.gap == doctest::Approx(1.8359).epsilon(1e-4));
    CHECK_FALSE(gap.theorem2_applicable);
    CHECK(std::abs(gap.gap - testsupport::brute_gap(clustered(), 100000)) < 1e-3);
}

TEST_CASE("zero finder agrees with a brute-force sign scan") {
    std::mt19937_64 rng(101);
    for (int c = 0; c < 200; ++c) {
        const CurveSpec spec = testsupport::make_curve_with_f(rng, 3 + c % 12);
        const auto set = critical_angles(split_fg(spec));
        CHECK(set.sign_change_count() == static_cast<std::size_t>(testsupport::brute_sign_changes(spec, 100000)));
        CHECK(set.sign_change_count() >= 6);
        for (std::size_t i = 0; i < set.angles.size(); ++i) {
            if (set.sign_changes[i]) CHECK(std::abs(testsupport::f_of(spec, set.angles[i])) < 1e-11);
        }
    }
}

TEST_CASE("tangential zeros are reported but not counted") {
    // sin 3t + sin 9t = 2 sin 3t cos^2 3t: double zeros at pi/6 + k pi/3.
    const auto set = critical_angles(split_fg(build_curve({{3, 0.01, 0.0}, {9, 0.01, 0.0}})));
    CHECK(set.sign_change_count() == 6);
    REQUIRE(set.angles.size() == 12);
    int tangential = 0;
    for (std::size_t i = 0; i < set.angles.size(); ++i) {
        if (!set.sign_changes[i]) {
            ++tangential;
            const double k = (set.angles[i] - kPi / 6) / (kPi / 3);
            CHECK(std::abs(k - std::round(k)) < 1e-6);
        }
    }
    CHECK(tangential == 6);
    CHECK(max_circular_gap(set).gap == doctest::Approx(kPi / 6).epsilon(1e-6));
}

TEST_CASE("constants") {
    CHECK(std::abs(theorem1_constant() - 0.608477342196869) < 1e-14);
    CHECK(std::abs(alpha_hat() - 0.442917126301) < 1e-11);
    CHECK(std::abs(lemma3_bound(alpha_hat()) - theorem1_constant()) < 1e-15);
    CHECK(lemma3_bound(0.0) == 1.0);
    CHECK(theorem1_constant() > 0.6);
}

TEST_CASE("alpha star") {
    CHECK(lemma3_alpha(split_fg(CurveSpec{})) == 0.0);
    CHECK(lemma3_alpha(split_fg(build_curve({{3, 0.1, 0.0}}))) < 1e-12);
    const double a = lemma3_alpha(split_fg(clustered()));
    CHECK(a == doctest::Approx(0.004986).epsilon(1e-3));
    CHECK(std::abs(a - testsupport::brute_alpha(clustered(), 1 << 20)) < 1e-6);

    std::mt19937_64 rng(3);
    for (int c = 0; c < 20; ++c) {
        const CurveSpec spec = testsupport::make_clustered(rng);
        const double alpha = lemma3_alpha(split_fg(spec));
        CHECK(std::abs(alpha - testsupport::brute_alpha(spec, 1 << 18)) < 1e-5);
        CHECK(alpha < alpha_hat());
    }
}

TEST_CASE("integral of |f'| is at most 2 pi") {
    const HarmonicSplit a3 = split_fg(build_curve({{3, 0.1, 0.0}}));
    CHECK(fprime_total_variation(a3.f) == doctest::Approx(1.2).epsilon(1e-12));
    const InequalityRecord r = verify_fprime_bound(a3);
    CHECK(r.pass);
    CHECK(r.lhs == doctest::Approx(2 * kPi));
    CHECK(r.rhs == doctest::Approx(1.2).epsilon(1e-6));
    CHECK(verify_fprime_bound(split_fg(CurveSpec{})).rhs == 0.0);

    std::mt19937_64 rng(9);
    for (int c = 0; c < 30; ++c) {
        const CurveSpec spec = testsupport::make_curve_with_f(rng, 11, 0.4);
        const HarmonicSplit split = split_fg(spec);
        // Sampled total variation.
        const int M = 1 << 18;
        double tv = 0.0, prev = testsupport::f_of(spec, 0.0);
        for (int i = 1; i <= M; ++i) {
            const double v = testsupport::f_of(spec, 2 * kPi * i / M);
            tv += std::abs(v - prev);
            prev = v;
        }
        CHECK(std::abs(fprime_total_variation(split.f) - tv) < 1e-8);
        CHECK(std::abs(verify_fprime_bound(split).rhs - tv) < 1e-6);
        CHECK(verify_fprime_bound(split).pass);
    }
}

TEST_CASE("odd part is orthogonal to sin(t + Delta)") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    for (int c = 0; c < 30; ++c) {
        const CurveSpec spec = testsupport::make_curve_with_f(rng, 11);
        const HarmonicSplit split = split_fg(spec);
        CHECK(sine_orthogonality_residual(split.f, 64) < 1e-12);
        CHECK(verify_sine_orthogonality(split).pass);

        // Over any half period as well: f(t) sin(t + Delta) has period pi.
        const double t0 = u(rng), delta = u(rng);
        const int M = 2000;
        const double h = kPi / M;
        double simpson = 0.0;
        for (int i = 0; i <= M; ++i) {
            const double t = t0 + i * h;
            const double w = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            simpson += w * testsupport::f_of(spec, t) * std::sin(t + delta);
        }
        CHECK(std::abs(simpson * h / 3) < 1e-12);
    }
}

TEST_CASE("sign-set inequalities") {
    CHECK_THROWS_AS(verify_sign_set_inequalities(split_fg(build_curve({{3, 0.1, 0.0}}))), NotApplicable);

    const CurveSpec spec = clustered();
    const SignSetReport rep = verify_sign_set_inequalities(split_fg(spec));
    for (const auto& r : rep.records) CHECK_MESSAGE(r.pass, r.name);
    CHECK(rep.alpha == doctest::Approx(lemma3_alpha(split_fg(spec))).epsilon(1e-6));

    // Midpoint rule for the positive and negative parts of F(u) = f(u - shift) on [0, t0).
    const int M = 1 << 20;
    const double h = rep.t0 / M;
    double plus = 0.0, minus = 0.0, plus_m = 0.0, minus_m = 0.0;
    for (int i = 0; i < M; ++i) {
        const double v = testsupport::f_of(spec, (i + 0.5) * h - rep.shift);
        if (v > 0) {
            plus += v * h;
            plus_m += h;
        } else if (v < 0) {
            minus += v * h;
            minus_m += h;
        }
    }
    CHECK(std::abs(std::abs(rep.plus_integral) - plus) < 1e-8);
    CHECK(std::abs(std::abs(rep.minus_integral) - std::abs(minus)) < 1e-8);
    CHECK(std::abs(rep.plus_measure - plus_m) < 1e-4);
    CHECK(std::abs(rep.minus_measure - minus_m) < 1e-4);
}

TEST_CASE("projection quotient") {
    const CurveGeometry circle = embed(CurveSpec{}, 256);
    const std::vector<double> flat(256, 1 / std::sqrt(2 * kPi));
    for (double beta : {0.0, 0.4, 1.3, 3.0}) {
        CHECK(projection_I(circle, flat, beta) == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(projection_I(circle, std::vector<double>(256, 0.0), 0.1), ZeroProjection);

    std::mt19937_64 rng(29);
    const CurveSpec spec = testsupport::make_curve_with_f(rng, 9, 0.3);
    const int N = 512;
    const CurveGeometry geom = embed(spec, N);
    std::vector<double> R(N);
    for (int i = 0; i < N; ++i) R[i] = 1.0 + 0.3 * std::cos(geom.s[i]) + 0.1 * std::sin(3 * geom.s[i]);
    const ProjectionQuotient q(geom, R);
    for (int k = 0; k < 36; ++k) {
        const double beta = k * kPi / 18;
        CHECK(q(beta) == doctest::Approx(projection_I(geom, R, beta)).epsilon(1e-10));
    }
}

TEST_CASE("full report on the fixtures") {
    for (const CurveSpec& spec : {CurveSpec{}, build_curve({{3, 0.1, 0.0}}), clustered(),
                                  build_curve({{2, 0.0, 0.2}, {3, 0.05, 0.0}})}) {
        const BoundReport rep = full_report(spec);
        for (const auto& r : rep.records) CHECK_MESSAGE(r.pass, r.name);
        CHECK(rep.passed());
        CHECK(rep.lambda_computed >= rep.lambda_lower_bound - 1e-5);
        CHECK(rep.find("theorem1_lower_bound") != nullptr);
        CHECK(rep.find("no_such_record") == nullptr);
    }
    const BoundReport circle = full_report(CurveSpec{});
    CHECK(std::abs(circle.lambda_computed - 1.0) < 1e-8);
    CHECK(circle.alpha_star == 0.0);

    const BoundReport cl = full_report(clustered());
    CHECK_FALSE(cl.theorem2_applicable);
    CHECK(cl.sign_sets.has_value());
    CHECK_FALSE(cl.find("theorem2_lower_bound")->applicable);
    CHECK(cl.lambda_computed == doctest::Approx(1.077501057).epsilon(1e-8));
}
