#include "ovalspec/curve.hpp"

#include "ovalspec/errors.hpp"
#include "periodic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace ovalspec {

namespace {

// k-th derivative of sum a sin(nt) + b cos(nt). Powers e^{int} come from a running product.
double series_derivative(const std::vector<Harmonic>& terms, double t, int order) {
    if (terms.empty()) return 0.0;
    const std::complex<double> step(std::cos(t), std::sin(t));
    std::complex<double> z(1.0, 0.0);
    int power = 0;
    double sum = 0.0;
    for (const auto& h : terms) {
        while (power < h.n) {
            z *= step;
            ++power;
        }
        // d^k/dt^k of (a sin + b cos) shifts the phase by k pi/2.
        double s = z.imag();
        double c = z.real();
        for (int k = 0; k < order % 4; ++k) {
            const double tmp = s;
            s = c;
            c = -tmp;
        }
        sum += std::pow(static_cast<double>(h.n), order) * (h.a * s + h.b * c);
    }
    return sum;
}

} // namespace

double wrap_2pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

TrigSeries::TrigSeries(std::vector<Harmonic> terms) : terms_(std::move(terms)) {
    std::sort(terms_.begin(), terms_.end(), [](const Harmonic& l, const Harmonic& r) { return l.n < r.n; });
    max_n_ = terms_.empty() ? 0 : terms_.back().n;
}

double TrigSeries::value(double t) const { return series_derivative(terms_, t, 0); }
double TrigSeries::derivative(double t) const { return series_derivative(terms_, t, 1); }
double TrigSeries::second_derivative(double t) const { return series_derivative(terms_, t, 2); }

bool TrigSeries::is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Harmonic& h) { return h.a == 0.0 && h.b == 0.0; });
}

double TrigSeries::amplitude_bound() const {
    double sum = 0.0;
    for (const auto& h : terms_) sum += std::abs(h.a) + std::abs(h.b);
    return sum;
}

double TrigSeries::slope_bound() const {
    double sum = 0.0;
    for (const auto& h : terms_) sum += h.n * (std::abs(h.a) + std::abs(h.b));
    return sum;
}

ConvexityCertificate certify_convexity(std::span<const Harmonic> harmonics) {
    std::vector<Harmonic> sorted(harmonics.begin(), harmonics.end());
    const TrigSeries p(std::move(sorted));
    if (p.is_zero()) return {1.0, 0.0};

    const int M = std::max(4096, 64 * p.max_n());
    const double dt = kTwoPi / M;
    std::vector<double> d(M);
    for (int j = 0; j < M; ++j) d[j] = 1.0 + p.derivative(j * dt);

    ConvexityCertificate best{std::numeric_limits<double>::infinity(), 0.0};
    for (int j = 0; j < M; ++j) {
        if (d[j] < best.min_derivative) best = {d[j], j * dt};
    }
    // Newton on D'(t) = 0 inside [t_j - dt, t_j + dt] for each sampled local minimum.
    for (int j = 0; j < M; ++j) {
        const double prev = d[(j + M - 1) % M];
        const double next = d[(j + 1) % M];
        if (!(d[j] <= prev && d[j] <= next)) continue;
        double lo = (j - 1) * dt;
        double hi = (j + 1) * dt;
        double slope_lo = p.second_derivative(lo);
        double slope_hi = p.second_derivative(hi);
        if (slope_lo > 0.0 || slope_hi < 0.0) continue;
        double t = j * dt;
        for (int it = 0; it < 60; ++it) {
            const double g = p.second_derivative(t);
            if (g == 0.0) break;
            if (g < 0.0) lo = t; else hi = t;
            const double curv = series_derivative(p.terms(), t, 3);
            double next_t = curv > 0.0 ? t - g / curv : 0.5 * (lo + hi);
            if (!(next_t > lo && next_t < hi)) next_t = 0.5 * (lo + hi);
            if (std::abs(next_t - t) < 1e-15) {
                t = next_t;
                break;
            }
            t = next_t;
        }
        const double value = 1.0 + p.derivative(t);
        if (value < best.min_derivative) best = {value, wrap_2pi(t)};
    }
    return best;
}

CurveSpec build_curve(std::vector<Harmonic> harmonics, double convexity_floor) {
    std::sort(harmonics.begin(), harmonics.end(), [](const Harmonic& l, const Harmonic& r) { return l.n < r.n; });
    for (std::size_t i = 0; i < harmonics.size(); ++i) {
        if (harmonics[i].n < 2) throw RejectBadIndex(harmonics[i].n);
        if (i > 0 && harmonics[i].n == harmonics[i - 1].n) throw RejectDuplicateIndex(harmonics[i].n);
        if (!std::isfinite(harmonics[i].a) || !std::isfinite(harmonics[i].b)) {
            throw FormatError("harmonic " + std::to_string(harmonics[i].n) + " has a non-finite coefficient");
        }
    }
    TrigSeries series(std::move(harmonics));
    // Fast accept: |sum n (a cos - b sin)| <= sum n (|a| + |b|).
    if (1.0 - series.slope_bound() <= convexity_floor) {
        const auto cert = certify_convexity(series.terms());
        if (cert.min_derivative <= convexity_floor) {
            throw RejectNonConvex(cert.min_derivative, cert.argmin, convexity_floor);
        }
    }
    return CurveSpec(std::move(series));
}

HarmonicSplit split_fg(const CurveSpec& spec) {
    std::vector<Harmonic> even;
    std::vector<Harmonic> odd;
    for (const auto& h : spec.harmonics()) (h.n % 2 == 0 ? even : odd).push_back(h);
    return {TrigSeries(std::move(even)), TrigSeries(std::move(odd))};
}

std::vector<Harmonic> merge_fg(const HarmonicSplit& split) {
    std::vector<Harmonic> all = split.g.terms();
    all.insert(all.end(), split.f.terms().begin(), split.f.terms().end());
    std::sort(all.begin(), all.end(), [](const Harmonic& l, const Harmonic& r) { return l.n < r.n; });
    return all;
}

double eval_phi_inverse(const CurveSpec& spec, double t) { return spec.phi_inverse(t); }

double eval_phi(const CurveSpec& spec, double s) {
    const TrigSeries& p = spec.perturbation();
    if (p.terms().empty()) return s;
    // t + p(t) = s with |p| <= B brackets the root in [s - B, s + B].
    const double bound = p.amplitude_bound();
    double lo = s - bound - 1e-12;
    double hi = s + bound + 1e-12;
    double t = s - p.value(s);
    t = std::clamp(t, lo, hi);
    const double tol = 1e-13 * std::max(1.0, std::abs(s));
    for (int it = 0; it < 200; ++it) {
        const double residual = t + p.value(t) - s;
        if (std::abs(residual) < tol) return t;
        if (residual < 0.0) lo = t; else hi = t;
        const double slope = 1.0 + p.derivative(t);
        double next = slope > 0.0 ? t - residual / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s))) return next;
        t = next;
    }
    throw NoConvergence("eval_phi: no convergence at s = " + std::to_string(s));
}

double curvature(const CurveSpec& spec, double s) {
    return 1.0 / spec.phi_inverse_derivative(eval_phi(spec, s));
}

std::vector<double> sample_phi(const CurveSpec& spec, int N) {
    std::vector<double> t(static_cast<std::size_t>(N));
    const double h = kTwoPi / N;
    for (int i = 0; i < N; ++i) t[i] = eval_phi(spec, i * h);
    return t;
}

CurveGeometry embed(const CurveSpec& spec, int N) {
    if (N < 8) throw Error("embed: N must be at least 8");
    CurveGeometry geom;
    const double h = kTwoPi / N;
    geom.t = sample_phi(spec, N);
    geom.s.resize(N);
    geom.kappa.resize(N);
    std::vector<std::complex<double>> tangent(N);
    for (int i = 0; i < N; ++i) {
        geom.s[i] = i * h;
        geom.kappa[i] = 1.0 / spec.phi_inverse_derivative(geom.t[i]);
        tangent[i] = {std::cos(geom.t[i]), std::sin(geom.t[i])};
    }
    std::complex<double> mean;
    const auto position = periodic::antiderivative(tangent, mean);
    geom.closure_residual = std::abs(mean) * kTwoPi;
    geom.x.resize(N);
    geom.y.resize(N);
    for (int i = 0; i < N; ++i) {
        geom.x[i] = position[i].real();
        geom.y[i] = position[i].imag();
    }
    return geom;
}

} // namespace ovalspec
