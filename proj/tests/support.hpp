#pragma once

// Shared helpers for the unit and acceptance tests. The oracles here are written from the
// definitions, independently of the library routines they check.

#include "ovalspec/curve.hpp"
#include "ovalspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <vector>

namespace testsupport {

using ovalspec::CurveSpec;
using ovalspec::Harmonic;

inline constexpr double kPi = std::numbers::pi;

// Test-local curve generator. Coefficient scale ~ amplitude * n^-1.5, random signs and
// phases; retries with a smaller amplitude until build_curve accepts it at `floor`.
inline CurveSpec make_curve(std::mt19937_64& rng, int max_n, double amplitude = 0.12, double floor = 0.02) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Harmonic> hs;
    for (int n = 2; n <= max_n; ++n) {
        const double scale = amplitude * std::pow(static_cast<double>(n), -1.5);
        hs.push_back({n, scale * normal(rng), scale * normal(rng)});
    }
    for (int attempt = 0; attempt < 60; ++attempt) {
        try {
            return ovalspec::build_curve(hs, floor);
        } catch (const ovalspec::RejectNonConvex&) {
            for (auto& h : hs) {
                h.a *= 0.8;
                h.b *= 0.8;
            }
        }
    }
    return CurveSpec{};
}

// Same, but f is forced to be nonzero (at least one odd harmonic).
inline CurveSpec make_curve_with_f(std::mt19937_64& rng, int max_n, double amplitude = 0.12) {
    for (;;) {
        CurveSpec c = make_curve(rng, std::max(max_n, 3), amplitude);
        for (const auto& h : c.harmonics()) {
            if (h.n % 2 == 1 && (h.a != 0.0 || h.b != 0.0)) return c;
        }
    }
}

// A perturbation of the clustered-zero family: the six zeros of f bunch together and leave a
// gap wider than pi/2. Random even harmonics are added on top.
inline CurveSpec make_clustered(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> jitter(0.85, 1.15);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const double rot = phase(rng);
    std::vector<Harmonic> hs;
    const double base[3] = {0.04, 0.06, 0.03};
    for (int k = 0; k < 3; ++k) {
        const int n = 3 + 2 * k;
        const double amp = base[k] * jitter(rng);
        // a sin(n (t - rot)) = a cos(n rot) sin(nt) - a sin(n rot) cos(nt)
        hs.push_back({n, amp * std::cos(n * rot), -amp * std::sin(n * rot)});
    }
    for (int n = 2; n <= 6; n += 2) {
        const double s = 0.01 / n;
        hs.push_back({n, s * normal(rng), s * normal(rng)});
    }
    return ovalspec::build_curve(hs, 0.01);
}

inline double series(const std::vector<Harmonic>& hs, double t, bool odd_only = false) {
    double v = 0.0;
    for (const auto& h : hs) {
        if (odd_only && h.n % 2 == 0) continue;
        v += h.a * std::sin(h.n * t) + h.b * std::cos(h.n * t);
    }
    return v;
}

inline double f_of(const CurveSpec& c, double t) { return series(c.harmonics(), t, true); }

// Number of sign changes of f on a uniform M-point circular scan.
inline int brute_sign_changes(const CurveSpec& c, int M) {
    int count = 0;
    double prev = f_of(c, 0.0);
    const double first = prev;
    for (int i = 1; i <= M; ++i) {
        const double v = (i == M) ? first : f_of(c, 2.0 * kPi * i / M);
        if ((prev < 0 && v > 0) || (prev > 0 && v < 0)) ++count;
        if (v != 0.0) prev = v;
    }
    return count;
}

// Largest circular gap between sign changes of f located on an M-point scan.
inline double brute_gap(const CurveSpec& c, int M) {
    std::vector<double> z;
    double prev = f_of(c, 0.0);
    for (int i = 1; i <= M; ++i) {
        const double t = 2.0 * kPi * i / M;
        const double v = f_of(c, t);
        if ((prev < 0 && v > 0) || (prev > 0 && v < 0)) z.push_back(t - kPi / M);
        prev = v;
    }
    if (z.empty()) return 2.0 * kPi;
    double gap = z.front() + 2.0 * kPi - z.back();
    for (std::size_t i = 1; i < z.size(); ++i) gap = std::max(gap, z[i] - z[i - 1]);
    return gap;
}

// max over windows [t, t + pi/2] of min |f|, by dense sampling (M divisible by 4) and a
// monotone-deque sliding minimum.
inline double brute_alpha(const CurveSpec& c, int M) {
    std::vector<double> a(M);
    for (int i = 0; i < M; ++i) a[i] = std::abs(f_of(c, 2.0 * kPi * i / M));
    const int w = M / 4 + 1;
    std::deque<int> q;
    double best = 0.0;
    for (int j = 0; j < M + w; ++j) {
        const double v = a[j % M];
        while (!q.empty() && a[q.back() % M] >= v) q.pop_back();
        q.push_back(j);
        if (q.front() <= j - w) q.pop_front();
        if (j >= w - 1) best = std::max(best, a[q.front() % M]);
    }
    return best;
}

} // namespace testsupport
