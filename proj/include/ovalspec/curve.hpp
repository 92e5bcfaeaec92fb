#pragma once

#include <numbers>
#include <span>
#include <vector>

namespace ovalspec {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One Fourier term a sin(nt) + b cos(nt) of phi^-1(t) - t.
struct Harmonic {
    int n = 0;
    double a = 0.0;
    double b = 0.0;

    friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// Reduce an angle or arc length into [0, 2pi).
double wrap_2pi(double x);

/// Finite sum  sum_k a_k sin(n_k t) + b_k cos(n_k t)  with its first two derivatives.
class TrigSeries {
public:
    TrigSeries() = default;
    explicit TrigSeries(std::vector<Harmonic> terms);

    double value(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;

    const std::vector<Harmonic>& terms() const { return terms_; }
    int max_n() const { return max_n_; }
    bool is_zero() const;
    /// sum |a_k| + |b_k|, an upper bound on |value|.
    double amplitude_bound() const;
    /// sum n_k (|a_k| + |b_k|), an upper bound on |derivative|.
    double slope_bound() const;

    friend bool operator==(const TrigSeries&, const TrigSeries&) = default;

private:
    std::vector<Harmonic> terms_;
    int max_n_ = 0;
};

struct ConvexityCertificate {
    double min_derivative; ///< minimum of (phi^-1)'(t) over the circle
    double argmin;         ///< angle where it is attained, in [0, 2pi)
};

/// Global minimum of (phi^-1)'(t) = 1 + sum n (a cos nt - b sin nt), found by dense
/// sampling at max(4096, 64 max_n) points and a Newton polish of every sampled local minimum.
ConvexityCertificate certify_convexity(std::span<const Harmonic> harmonics);

/// Validated Fourier description of a strictly convex closed curve of length 2pi.
///
/// The tangent-angle inverse is phi^-1(t) = t + sum_n a_n sin nt + b_n cos nt with n >= 2.
/// Instances are immutable and only constructed through build_curve.
class CurveSpec {
public:
    /// The circle.
    CurveSpec() = default;

    const std::vector<Harmonic>& harmonics() const { return perturbation_.terms(); }
    const TrigSeries& perturbation() const { return perturbation_; }
    int max_n() const { return perturbation_.max_n(); }
    bool is_circle() const { return perturbation_.is_zero(); }

    /// phi^-1(t) on the lift: continuous and strictly increasing in t.
    double phi_inverse(double t) const { return t + perturbation_.value(t); }
    /// (phi^-1)'(t) = 1 / kappa at tangent angle t.
    double phi_inverse_derivative(double t) const { return 1.0 + perturbation_.derivative(t); }

    friend bool operator==(const CurveSpec&, const CurveSpec&) = default;

private:
    friend CurveSpec build_curve(std::vector<Harmonic>, double);
    explicit CurveSpec(TrigSeries s) : perturbation_(std::move(s)) {}

    TrigSeries perturbation_;
};

inline constexpr double kDefaultConvexityFloor = 1e-6;

/// Validates and sorts the harmonics. Zero entries are kept so that files round-trip.
/// Throws RejectBadIndex, RejectDuplicateIndex or RejectNonConvex.
CurveSpec build_curve(std::vector<Harmonic> harmonics, double convexity_floor = kDefaultConvexityFloor);

/// Even part g (n = 2, 4, ...) and odd part f (n = 3, 5, ...) of phi^-1(t) - t.
struct HarmonicSplit {
    TrigSeries g;
    TrigSeries f;
};

HarmonicSplit split_fg(const CurveSpec& spec);
/// Inverse of split_fg.
std::vector<Harmonic> merge_fg(const HarmonicSplit& split);

/// phi^-1(t) = t + g(t) + f(t), on the lift.
double eval_phi_inverse(const CurveSpec& spec, double t);

/// Tangent angle phi(s) on the lift, i.e. the t with phi^-1(t) = s to within 1e-12.
/// Throws NoConvergence after 200 iterations.
double eval_phi(const CurveSpec& spec, double s);

/// kappa(s) = phi'(s) = 1 / (phi^-1)'(phi(s)).
double curvature(const CurveSpec& spec, double s);

/// Uniform arc-length sampling of the curve and its planar embedding.
struct CurveGeometry {
    std::vector<double> s;     ///< s_i = 2 pi i / N
    std::vector<double> t;     ///< phi(s_i), lifted
    std::vector<double> kappa; ///< curvature samples
    std::vector<double> x;
    std::vector<double> y;
    double closure_residual = 0.0; ///< |sum (cos phi, sin phi)| * 2pi/N

    std::size_t size() const { return s.size(); }
    double spacing() const { return kTwoPi / static_cast<double>(s.size()); }
};

/// Samples phi and kappa on N points and integrates (cos phi, sin phi) to get (x, y).
/// Requires N >= 8; N even for the antipodal symmetry of g-only curves to hold on-grid.
CurveGeometry embed(const CurveSpec& spec, int N);

/// Tangent angles phi(s_i) on the uniform grid s_i = 2 pi i / N.
std::vector<double> sample_phi(const CurveSpec& spec, int N);

} // namespace ovalspec
