#include "ovalspec/analysis.hpp"

#include "ovalspec/errors.hpp"
#include "periodic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace ovalspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kZeroTol = 1e-10;

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Root of fn in [lo, hi] given opposite signs at the ends, bisected to width 1e-13.
double bisect(const std::function<double(double)>& fn, double lo, double hi) {
    double flo = fn(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if (sign_of(fm) == sign_of(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Root {
    double t;
    bool sign_change;
};

// Zeros of a 2pi-periodic function from a sign scan on M points. Exact zeros at grid
// nodes are classified by the signs of their nearest nonzero neighbours.
std::vector<Root> scan_roots(const std::function<double(double)>& fn, int M) {
    const double dt = kTwoPi / M;
    std::vector<double> v(M);
    for (int j = 0; j < M; ++j) v[j] = fn(j * dt);
    std::vector<Root> roots;
    for (int j = 0; j < M; ++j) {
        if (v[j] == 0.0) {
            double before = 0.0;
            double after = 0.0;
            for (int k = 1; k < M && before == 0.0; ++k) before = sign_of(v[(j - k + M) % M]);
            for (int k = 1; k < M && after == 0.0; ++k) after = sign_of(v[(j + k) % M]);
            roots.push_back({j * dt, before != after});
            continue;
        }
        const double next = v[(j + 1) % M];
        if (next != 0.0 && sign_of(next) != sign_of(v[j])) {
            roots.push_back({wrap_2pi(bisect(fn, j * dt, (j + 1) * dt)), true});
        }
    }
    return roots;
}

int scan_points(const TrigSeries& f) { return std::max(2048, 128 * f.max_n()); }

// Local extrema of f: sign changes of f'.
std::vector<double> extrema(const TrigSeries& f) {
    std::vector<double> out;
    for (const auto& r : scan_roots([&](double t) { return f.derivative(t); }, scan_points(f))) {
        if (r.sign_change) out.push_back(r.t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double circular_distance(double a, double b) {
    const double d = wrap_2pi(a - b);
    return std::min(d, kTwoPi - d);
}

// x lies in the closed arc [start, start + length].
bool in_arc(double x, double start, double length) { return wrap_2pi(x - start) <= length; }

// Golden-section maximization of a unimodal function on [lo, hi].
std::pair<double, double> golden_max(const std::function<double(double)>& fn, double lo, double hi) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo;
    double b = hi;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = fn(d);
        }
    }
    const double t = 0.5 * (a + b);
    return {t, fn(t)};
}

// Maximize fn over [lo, hi]: dense scan followed by golden refinement of every grid local
// maximum within `lipschitz * step` of the best sample.
std::pair<double, double> maximize_on_grid(const std::function<double(double)>& fn, double lo, double hi, int M,
                                           double lipschitz) {
    const double step = (hi - lo) / M;
    std::vector<double> v(M + 1);
    for (int j = 0; j <= M; ++j) v[j] = fn(lo + j * step);
    const double best_sample = *std::max_element(v.begin(), v.end());
    std::pair<double, double> best{lo, -std::numeric_limits<double>::infinity()};
    for (int j = 0; j <= M; ++j) {
        if (v[j] > best.second) best = {lo + j * step, v[j]};
    }
    for (int j = 0; j <= M; ++j) {
        const bool local = (j == 0 || v[j] >= v[j - 1]) && (j == M || v[j] >= v[j + 1]);
        if (!local || v[j] < best_sample - lipschitz * step) continue;
        const double a = std::max(lo, lo + (j - 1) * step);
        const double b = std::min(hi, lo + (j + 1) * step);
        const auto refined = golden_max(fn, a, b);
        if (refined.second > best.second) best = refined;
    }
    return best;
}

// Antiderivative of sum a sin(nt) + b cos(nt).
double antiderivative(const TrigSeries& f, double t) {
    double sum = 0.0;
    for (const auto& h : f.terms()) {
        sum += (-h.a * std::cos(h.n * t) + h.b * std::sin(h.n * t)) / h.n;
    }
    return sum;
}

} // namespace

std::size_t CriticalAngleSet::sign_change_count() const {
    return static_cast<std::size_t>(std::count(sign_changes.begin(), sign_changes.end(), true));
}

CriticalAngleSet critical_angles(const HarmonicSplit& split) {
    CriticalAngleSet set;
    const TrigSeries& f = split.f;
    if (f.is_zero()) {
        set.f_identically_zero = true;
        return set;
    }
    std::vector<Root> roots = scan_roots([&](double t) { return f.value(t); }, scan_points(f));
    // Double zeros between grid nodes show up as extrema with |f| ~ 0.
    for (double e : extrema(f)) {
        if (std::abs(f.value(e)) >= kZeroTol) continue;
        const bool near_crossing = std::any_of(roots.begin(), roots.end(), [&](const Root& r) {
            return r.sign_change && circular_distance(r.t, e) < 1e-7;
        });
        if (!near_crossing) roots.push_back({e, false});
    }
    std::sort(roots.begin(), roots.end(), [](const Root& l, const Root& r) { return l.t < r.t; });
    std::vector<Root> merged;
    for (const auto& r : roots) {
        if (!merged.empty() && circular_distance(merged.back().t, r.t) < 1e-9) {
            merged.back().sign_change = merged.back().sign_change || r.sign_change;
            continue;
        }
        merged.push_back(r);
    }
    if (merged.size() > 1 && circular_distance(merged.front().t, merged.back().t) < 1e-9) {
        merged.front().sign_change = merged.front().sign_change || merged.back().sign_change;
        merged.pop_back();
    }
    for (const auto& r : merged) {
        set.angles.push_back(r.t);
        set.sign_changes.push_back(r.sign_change);
    }
    return set;
}

Lemma1Check check_lemma1(const CriticalAngleSet& set) {
    Lemma1Check check;
    check.sign_changing_angles = set.sign_change_count();
    check.critical_points = set.angles.size();
    check.pass = set.f_identically_zero || check.sign_changing_angles >= 6;
    return check;
}

GapResult max_circular_gap(const CriticalAngleSet& set) {
    GapResult result;
    if (set.f_identically_zero) return result;
    if (set.angles.empty()) {
        result.gap = kTwoPi;
    } else {
        const auto& a = set.angles;
        result.gap = a.front() + kTwoPi - a.back();
        for (std::size_t i = 1; i < a.size(); ++i) result.gap = std::max(result.gap, a[i] - a[i - 1]);
    }
    result.theorem2_applicable = result.gap <= kHalfPi;
    return result;
}

double theorem1_constant() {
    const double inner = 1.0 + 1.0 / (1.0 + 8.0 / kPi);
    return 1.0 / (inner * inner);
}

double alpha_hat() { return kPi / (2.0 * (1.0 + 8.0 / kPi)); }

double lemma3_bound(double alpha) {
    const double q = 1.0 + 2.0 * alpha / kPi;
    return 1.0 / (q * q);
}

double lemma3_alpha(const HarmonicSplit& split, int resolution) {
    const TrigSeries& f = split.f;
    if (f.is_zero()) return 0.0;
    const CriticalAngleSet zeros = critical_angles(split);
    const std::vector<double> ext = extrema(f);

    // Minimum of |f| over the closed window [t, t + pi/2].
    const auto window_min = [&](double t) {
        for (double z : zeros.angles) {
            if (in_arc(z, t, kHalfPi)) return 0.0;
        }
        double m = std::min(std::abs(f.value(t)), std::abs(f.value(t + kHalfPi)));
        for (double e : ext) {
            if (in_arc(e, t, kHalfPi)) m = std::min(m, std::abs(f.value(e)));
        }
        return m;
    };
    const int M = std::max(resolution, 4096);
    return maximize_on_grid(window_min, 0.0, kTwoPi, M, f.slope_bound()).second;
}

InequalityRecord InequalityRecord::make(std::string name, double lhs, double rhs, double slack, bool strict) {
    InequalityRecord r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = slack;
    r.strict = strict;
    r.pass = strict ? (lhs > rhs - slack) : (lhs >= rhs - slack);
    return r;
}

InequalityRecord InequalityRecord::not_applicable(std::string name) {
    InequalityRecord r;
    r.name = std::move(name);
    r.lhs = std::numeric_limits<double>::quiet_NaN();
    r.rhs = std::numeric_limits<double>::quiet_NaN();
    r.applicable = false;
    r.pass = true;
    return r;
}

InequalityRecord verify_fprime_bound(const HarmonicSplit& split, int quad_N) {
    const double h = kTwoPi / quad_N;
    double sum = 0.0;
    for (int j = 0; j < quad_N; ++j) sum += std::abs(split.f.derivative(j * h));
    return InequalityRecord::make("fprime_integral_le_2pi", kTwoPi, sum * h, 1e-6);
}

double fprime_total_variation(const TrigSeries& f) {
    if (f.is_zero()) return 0.0;
    const std::vector<double> ext = extrema(f);
    if (ext.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < ext.size(); ++i) {
        const double next = ext[(i + 1) % ext.size()];
        total += std::abs(f.value(next) - f.value(ext[i]));
    }
    return total;
}

double sine_orthogonality_residual(const TrigSeries& f, int quad_N) {
    const double h = kTwoPi / quad_N;
    std::vector<double> samples(quad_N);
    for (int j = 0; j < quad_N; ++j) samples[j] = f.value(j * h);
    double worst = 0.0;
    for (int k = 0; k < 14; ++k) {
        const double delta = k * kPi / 7.0;
        double sum = 0.0;
        for (int j = 0; j < quad_N; ++j) sum += samples[j] * std::sin(j * h + delta);
        worst = std::max(worst, std::abs(sum * h));
    }
    return worst;
}

InequalityRecord verify_sine_orthogonality(const HarmonicSplit& split, int quad_N) {
    // Periodic trapezoid is exact once quad_N > 2 max_n + 2.
    quad_N = std::max(quad_N, 2 * split.f.max_n() + 4);
    const double residual = sine_orthogonality_residual(split.f, quad_N);
    return InequalityRecord::make("sine_orthogonality", 1e-10, residual, 0.0, true);
}

SignSetReport verify_sign_set_inequalities(const HarmonicSplit& split) {
    const TrigSeries& f = split.f;
    if (f.is_zero()) throw NotApplicable("f vanishes identically; every window holds a critical angle");
    const CriticalAngleSet set = critical_angles(split);
    if (max_circular_gap(set).theorem2_applicable) {
        throw NotApplicable("every window of length pi/2 holds a critical angle");
    }
    std::vector<double> crossings;
    for (std::size_t i = 0; i < set.angles.size(); ++i) {
        if (set.sign_changes[i]) crossings.push_back(set.angles[i]);
    }
    if (crossings.size() < 2) throw NotApplicable("fewer than two sign-changing zeros");

    double start = 0.0;
    double length = -1.0;
    for (std::size_t i = 0; i < crossings.size(); ++i) {
        const double next = i + 1 < crossings.size() ? crossings[i + 1] : crossings.front() + kTwoPi;
        if (next - crossings[i] > length) {
            length = next - crossings[i];
            start = crossings[i];
        }
    }
    if (length <= kHalfPi || length >= kPi) throw NotApplicable("no zero-free arc of length in (pi/2, pi)");
    // f(t + pi) = -f(t): the antipodal arc carries the opposite sign.
    if (f.value(start + 0.5 * length) < 0.0) start += kPi;

    SignSetReport report;
    report.shift = kPi - (start + length);
    report.t0 = kPi - length;
    const double shift = report.shift;
    const auto F = [&](double u) { return f.value(u - shift); };

    std::vector<double> cuts{0.0, report.t0};
    for (double z : crossings) {
        const double u = wrap_2pi(z + shift);
        if (u > 1e-12 && u < report.t0 - 1e-12) cuts.push_back(u);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double p = cuts[i];
        const double q = cuts[i + 1];
        if (q - p <= 0.0) continue;
        const double integral = antiderivative(f, q - shift) - antiderivative(f, p - shift);
        if (F(0.5 * (p + q)) > 0.0) {
            report.plus_integral += integral;
            report.plus_measure += q - p;
        } else {
            report.minus_integral += integral;
            report.minus_measure += q - p;
        }
    }

    // alpha: best lower bound of F over a window [t1, t1 + pi/2] inside [t0, pi].
    std::vector<double> ext;
    for (double e : extrema(f)) ext.push_back(wrap_2pi(e + shift));
    const auto window_min = [&](double t1) {
        double m = std::min(F(t1), F(t1 + kHalfPi));
        for (double e : ext) {
            if (e >= t1 && e <= t1 + kHalfPi) m = std::min(m, F(e));
        }
        return m;
    };
    const auto best = maximize_on_grid(window_min, report.t0, kHalfPi, 4096, f.slope_bound());
    report.window_start = best.first;
    report.alpha = std::max(best.second, 0.0);
    report.fprime_integral = fprime_total_variation(f);

    const double slack = 1e-5;
    const double a = report.alpha;
    report.records.push_back(InequalityRecord::make("sign_set_plus_integral", report.plus_integral, a, slack));
    report.records.push_back(InequalityRecord::make("sign_set_minus_integral", -report.minus_integral, a, slack));
    report.records.push_back(
        InequalityRecord::make("sign_set_measure", kHalfPi, report.plus_measure + report.minus_measure, 0.0, true));
    report.records.push_back(
        InequalityRecord::make("fprime_chain", report.fprime_integral, 4.0 * a * (1.0 + 8.0 / kPi), slack));
    report.records.push_back(InequalityRecord::make("sign_set_alpha_below_alpha_hat", alpha_hat(), a, 0.0, true));
    return report;
}

double projection_I(const CurveGeometry& geom, std::span<const double> R, double beta) {
    const std::size_t N = geom.size();
    if (R.size() != N) throw Error("projection_I: R and geometry sizes differ");
    std::vector<double> hb(N);
    const double sb = std::sin(beta);
    const double cb = std::cos(beta);
    for (std::size_t i = 0; i < N; ++i) {
        hb[i] = R[i] * (std::cos(geom.t[i]) * sb - std::sin(geom.t[i]) * cb);
    }
    const std::vector<double> dh = periodic::derivative(hb);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        num += dh[i] * dh[i];
        den += hb[i] * hb[i];
    }
    if (std::sqrt(den * geom.spacing()) < 1e-12) throw ZeroProjection("projection h_beta vanishes");
    return num / den;
}

ProjectionQuotient::ProjectionQuotient(const CurveGeometry& geom, std::span<const double> R) {
    const std::size_t N = geom.size();
    if (R.size() != N) throw Error("ProjectionQuotient: R and geometry sizes differ");
    std::vector<double> x(N);
    std::vector<double> y(N);
    for (std::size_t i = 0; i < N; ++i) {
        x[i] = R[i] * std::cos(geom.t[i]);
        y[i] = R[i] * std::sin(geom.t[i]);
    }
    const auto dx = periodic::derivative(x);
    const auto dy = periodic::derivative(y);
    for (std::size_t i = 0; i < N; ++i) {
        xx_ += x[i] * x[i];
        yy_ += y[i] * y[i];
        xy_ += x[i] * y[i];
        dxx_ += dx[i] * dx[i];
        dyy_ += dy[i] * dy[i];
        dxy_ += dx[i] * dy[i];
    }
}

double ProjectionQuotient::operator()(double beta) const {
    const double s = std::sin(beta);
    const double c = std::cos(beta);
    const double num = s * s * dxx_ - 2.0 * s * c * dxy_ + c * c * dyy_;
    const double den = s * s * xx_ - 2.0 * s * c * xy_ + c * c * yy_;
    if (!(den > 0.0)) throw ZeroProjection("projection h_beta vanishes");
    return num / den;
}

bool BoundReport::passed() const {
    return std::all_of(records.begin(), records.end(), [](const InequalityRecord& r) { return r.pass; });
}

const InequalityRecord* BoundReport::find(const std::string& name) const {
    for (const auto& r : records) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

namespace {

BoundReport build_report(const CurveSpec& spec, const ReportOptions& options) {
    BoundReport report;
    const HarmonicSplit split = split_fg(spec);
    auto& rec = report.records;

    report.spectral = converge_lambda(spec, options.lambda_tol, options.converge);
    report.lambda_computed = report.spectral.extrapolated_lambda;
    const double lambda = report.lambda_computed;

    report.critical = critical_angles(split);
    const GapResult gap = max_circular_gap(report.critical);
    report.max_gap = gap.gap;
    report.theorem2_applicable = gap.theorem2_applicable;
    report.alpha_star = lemma3_alpha(split, options.alpha_resolution);
    report.lambda_lower_bound = lemma3_bound(report.alpha_star);

    if (report.critical.f_identically_zero) {
        rec.push_back(InequalityRecord::not_applicable("lemma1_sign_changes"));
    } else {
        const Lemma1Check l1 = check_lemma1(report.critical);
        rec.push_back(InequalityRecord::make("lemma1_sign_changes", static_cast<double>(l1.sign_changing_angles),
                                             6.0, 0.0));
    }
    rec.push_back(verify_fprime_bound(split, options.quad_N));
    rec.push_back(verify_sine_orthogonality(split));
    rec.push_back(InequalityRecord::make("alpha_star_below_alpha_hat", alpha_hat(), report.alpha_star, 0.0, true));

    // I(beta) against the Dirichlet-interval bound on a uniform beta grid and at every zero of f.
    const CurveGeometry geom = embed(spec, report.spectral.N);
    const ProjectionQuotient quotient(geom, report.spectral.R);
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_lhs = 0.0;
    double worst_rhs = 0.0;
    for (int k = 0; k < options.beta_count; ++k) {
        const double beta = kTwoPi * k / options.beta_count;
        const double value = quotient(beta);
        const double bound = lemma3_bound(std::abs(split.f.value(beta)));
        if (value - bound < worst_margin) {
            worst_margin = value - bound;
            worst_lhs = value;
            worst_rhs = bound;
        }
    }
    rec.push_back(InequalityRecord::make("projection_quotient_bound", worst_lhs, worst_rhs, options.slack));
    if (!report.critical.f_identically_zero) {
        double worst_zero = std::numeric_limits<double>::infinity();
        for (double z : report.critical.angles) worst_zero = std::min(worst_zero, quotient(z));
        rec.push_back(InequalityRecord::make("projection_quotient_at_zeros", worst_zero, 1.0, 1e-6));
    }

    try {
        SignSetReport sign_sets = verify_sign_set_inequalities(split);
        rec.insert(rec.end(), sign_sets.records.begin(), sign_sets.records.end());
        report.sign_sets = std::move(sign_sets);
    } catch (const NotApplicable&) {
        rec.push_back(InequalityRecord::not_applicable("sign_set_inequalities"));
    }

    if (report.spectral.scheme_discrepancy) {
        rec.push_back(InequalityRecord::make("scheme_agreement", 1e-6, *report.spectral.scheme_discrepancy, 0.0));
    }
    rec.push_back(InequalityRecord::make("lemma3_lower_bound", lambda, report.lambda_lower_bound, options.lambda_tol));
    rec.push_back(InequalityRecord::make("theorem1_lower_bound", lambda, theorem1_constant(), options.lambda_tol));
    if (report.theorem2_applicable) {
        rec.push_back(InequalityRecord::make("theorem2_lower_bound", lambda, 1.0, options.lambda_tol));
    } else {
        rec.push_back(InequalityRecord::not_applicable("theorem2_lower_bound"));
    }
    return report;
}

} // namespace

BoundReport full_report(const CurveSpec& spec, const ReportOptions& options) {
    BoundReport report = build_report(spec, options);
    if (report.passed() || !options.rerun_on_failure) return report;
    ReportOptions finer = options;
    finer.rerun_on_failure = false;
    finer.quad_N *= 2;
    finer.alpha_resolution *= 2;
    finer.beta_count *= 2;
    finer.converge.start_N *= 2;
    finer.converge.cross_check_max_N *= 2;
    BoundReport second = build_report(spec, finer);
    second.rerun = true;
    return second;
}

} // namespace ovalspec
