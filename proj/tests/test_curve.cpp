#include "support.hpp"

#include "ovalspec/curve.hpp"
#include "ovalspec/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ovalspec;
using testsupport::kPi;

TEST_CASE("build_curve validates indices and convexity") {
    CHECK(build_curve({}).is_circle());
    CHECK_THROWS_AS(build_curve({{1, 0.1, 0.0}}), RejectBadIndex);
    CHECK_THROWS_AS(build_curve({{0, 0.1, 0.0}}), RejectBadIndex);
    CHECK_THROWS_AS(build_curve({{3, 0.1, 0.0}, {3, 0.0, 0.1}}), RejectDuplicateIndex);
    CHECK_THROWS_AS(build_curve({{2, NAN, 0.0}}), Error);

    // 1 + 2 * 0.6 cos 2t has minimum -0.2 at t = pi/2.
    try {
        build_curve({{2, 0.6, 0.0}});
        FAIL("accepted a non-convex curve");
    } catch (const RejectNonConvex& e) {
        CHECK(e.min_derivative == doctest::Approx(-0.2).epsilon(1e-10));
        CHECK(e.argmin == doctest::Approx(kPi / 2).epsilon(1e-8));
    }

    // Borderline: minimum exactly 0 is rejected at the default floor.
    CHECK_THROWS_AS(build_curve({{2, 0.5, 0.0}}), RejectNonConvex);
    CHECK_NOTHROW(build_curve({{2, 0.49, 0.0}}));

    const CurveSpec sorted = build_curve({{5, 0.01, 0.0}, {3, 0.02, 0.0}, {2, 0.0, 0.03}});
    REQUIRE(sorted.harmonics().size() == 3);
    CHECK(sorted.harmonics()[0].n == 2);
    CHECK(sorted.harmonics()[2].n == 5);
}

TEST_CASE("convexity certificate never overstates the minimum") {
    std::mt19937_64 rng(11);
    int audited = 0;
    for (int c = 0; c < 100; ++c) {
        const CurveSpec spec = testsupport::make_curve(rng, 2 + c % 11, 0.3, 1e-3);
        const auto cert = certify_convexity(spec.harmonics());
        // Sampling overestimates the minimum by at most max|D''| h^2 / 8.
        double curv = 0.0;
        for (const auto& h : spec.harmonics()) curv += std::pow(h.n, 3) * (std::abs(h.a) + std::abs(h.b));
        const double resolution = curv * std::pow(2 * kPi / 10000, 2) / 8;
        double brute = 1e300;
        for (int i = 0; i < 10000; ++i) {
            brute = std::min(brute, spec.phi_inverse_derivative(2 * kPi * i / 10000.0));
            ++audited;
        }
        CHECK(cert.min_derivative <= brute + 1e-12);
        CHECK(brute - cert.min_derivative <= resolution + 1e-12);
        CHECK(cert.min_derivative > 0.0);
    }
    CHECK(audited == 1000000);
}

TEST_CASE("phi and phi inverse round-trip") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
        const CurveSpec spec = testsupport::make_curve(rng, 2 + c % 10, 0.3);
        for (int k = 0; k < 20; ++k) {
            const double s = u(rng);
            worst = std::max(worst, std::abs(eval_phi_inverse(spec, eval_phi(spec, s)) - s));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("half-turn identity of phi inverse") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    for (int c = 0; c < 30; ++c) {
        const CurveSpec spec = testsupport::make_curve(rng, 9);
        const HarmonicSplit split = split_fg(spec);
        for (int k = 0; k < 10; ++k) {
            const double t = u(rng);
            CHECK(std::abs(split.f.value(t + kPi) + split.f.value(t)) < 1e-13);
            CHECK(std::abs(split.g.value(t + kPi) - split.g.value(t)) < 1e-13);
            const double lhs = eval_phi_inverse(spec, t + kPi);
            const double rhs = eval_phi_inverse(spec, t) + kPi - 2 * split.f.value(t);
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
        CHECK(build_curve(merge_fg(split)) == spec);
    }
}

TEST_CASE("curvature and total turning") {
    // (phi^-1)'(t) = 1 + 0.3 cos 3t; kappa integrates to 2pi and kappa^2 ds to
    // int_0^2pi dt / (1 + 0.3 cos 3t) = 2 pi / sqrt(1 - 0.09).
    const CurveSpec spec = build_curve({{3, 0.1, 0.0}});
    const int N = 2048;
    double turning = 0.0, energy = 0.0, kmin = 1e9, kmax = 0.0;
    for (int i = 0; i < N; ++i) {
        const double k = curvature(spec, 2 * kPi * i / N);
        turning += k;
        energy += k * k;
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    turning *= 2 * kPi / N;
    energy *= 2 * kPi / N;
    CHECK(std::abs(turning - 2 * kPi) < 1e-8);
    CHECK(std::abs(energy - 2 * kPi / std::sqrt(0.91)) < 1e-8);
    CHECK(kmin == doctest::Approx(1 / 1.3).epsilon(1e-9));
    CHECK(kmax == doctest::Approx(1 / 0.7).epsilon(1e-9));

    std::mt19937_64 rng(3);
    for (int c = 0; c < 20; ++c) {
        const CurveSpec r = testsupport::make_curve(rng, 12);
        const CurveGeometry g = embed(r, 1024);
        double sum = 0.0;
        for (double k : g.kappa) sum += k;
        CHECK(std::abs(sum * g.spacing() - 2 * kPi) < 1e-8);
    }
}

TEST_CASE("embed closes the curve") {
    const CurveGeometry circle = embed(CurveSpec{}, 256);
    CHECK(circle.closure_residual < 1e-12);
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < circle.size(); ++i) {
        cx += circle.x[i] / circle.size();
        cy += circle.y[i] / circle.size();
    }
    double radius_err = 0.0;
    for (std::size_t i = 0; i < circle.size(); ++i) {
        radius_err = std::max(radius_err, std::abs(std::hypot(circle.x[i] - cx, circle.y[i] - cy) - 1.0));
    }
    CHECK(radius_err < 1e-12);

    const CurveSpec a3 = build_curve({{3, 0.1, 0.0}});
    double prev = 1e9;
    for (int N : {64, 128, 256, 512}) {
        const double r = embed(a3, N).closure_residual;
        CHECK(r <= std::max(prev, 1e-13));
        prev = r;
    }
    CHECK(prev < 1e-6);
    CHECK_THROWS_AS(embed(a3, 4), Error);
}

TEST_CASE("even-only curves are point symmetric") {
    const CurveSpec spec = build_curve({{2, 0.0, 0.2}});
    const int N = 512;
    const CurveGeometry g = embed(spec, N);
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        cx += g.x[i] / N;
        cy += g.y[i] / N;
    }
    double worst = 0.0;
    for (int i = 0; i < N / 2; ++i) {
        worst = std::max(worst, std::abs((g.x[i + N / 2] - cx) + (g.x[i] - cx)));
        worst = std::max(worst, std::abs((g.y[i + N / 2] - cy) + (g.y[i] - cy)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("wrap_2pi") {
    CHECK(wrap_2pi(0.0) == 0.0);
    CHECK(wrap_2pi(-0.5) == doctest::Approx(2 * kPi - 0.5));
    CHECK(wrap_2pi(7.0) == doctest::Approx(7.0 - 2 * kPi));
    CHECK(wrap_2pi(2 * kPi) < 2 * kPi);
}
