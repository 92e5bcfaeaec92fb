#pragma once

#include "ovalspec/curve.hpp"
#include "ovalspec/spectral.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ovalspec {

/// Critical angles of a curve, i.e. the zeros of the odd part f on [0, 2pi).
struct CriticalAngleSet {
    std::vector<double> angles;      ///< sorted, in [0, 2pi)
    std::vector<bool> sign_changes;  ///< parallel to `angles`; false marks a tangential zero
    bool f_identically_zero = false; ///< f == 0: every angle is critical and `angles` is empty

    std::size_t sign_change_count() const;
};

/// Scans f on max(2048, 128 max_n) points, bisects every sign change to 1e-13 and
/// reports extrema of f with |f| < 1e-10 as tangential zeros.
CriticalAngleSet critical_angles(const HarmonicSplit& split);

struct Lemma1Check {
    bool pass = false;
    std::size_t sign_changing_angles = 0;
    /// Critical points s = phi^-1(t); one per critical angle.
    std::size_t critical_points = 0;
};

/// At least six sign-changing zeros of a nontrivial f. An f == 0 set passes vacuously.
Lemma1Check check_lemma1(const CriticalAngleSet& set);

struct GapResult {
    double gap = 0.0;
    bool theorem2_applicable = true; ///< gap <= pi/2
};

/// Largest circular spacing between consecutive critical angles (tangential ones included).
GapResult max_circular_gap(const CriticalAngleSet& set);

/// (1 + 1/(1 + 8/pi))^-2, the universal lower bound on lambda.
double theorem1_constant();
/// pi / (2 (1 + 8/pi)), the largest admissible amplitude in the universal bound.
double alpha_hat();
/// (1 + 2 alpha / pi)^-2.
double lemma3_bound(double alpha);

/// Smallest alpha >= 0 such that {t : |f(t)| <= alpha} meets every closed window of length pi/2.
/// Windows are scanned at `resolution` starts and the best one is refined to 1e-10.
double lemma3_alpha(const HarmonicSplit& split, int resolution = 4096);

/// One checked inequality lhs >= rhs - slack (or lhs > rhs when `strict`).
struct InequalityRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool strict = false;
    bool applicable = true;
    bool pass = true;

    double margin() const { return lhs - rhs; }
    static InequalityRecord make(std::string name, double lhs, double rhs, double slack, bool strict = false);
    static InequalityRecord not_applicable(std::string name);
};

/// Trapezoid estimate of the integral of |f'| over the circle, checked against 2 pi (slack 1e-6).
InequalityRecord verify_fprime_bound(const HarmonicSplit& split, int quad_N = 1 << 16);

/// Total variation of f over one period from its extrema, i.e. the exact integral of |f'|.
double fprime_total_variation(const TrigSeries& f);

/// max over Delta = k pi / 7 (k = 0..13) of |trapezoid integral of f(t) sin(t + Delta)|.
double sine_orthogonality_residual(const TrigSeries& f, int quad_N);
/// Passes iff the residual is below 1e-10.
InequalityRecord verify_sine_orthogonality(const HarmonicSplit& split, int quad_N = 256);

/// The sign-set configuration used when no critical angle lies in some window of length pi/2.
struct SignSetReport {
    double shift = 0.0;          ///< f is evaluated as F(u) = f(u - shift)
    double t0 = 0.0;             ///< F has consecutive sign-changing zeros t0 and pi, F > 0 between
    double alpha = 0.0;          ///< max over windows [t1, t1 + pi/2] in [t0, pi] of min F
    double window_start = 0.0;   ///< t1 attaining alpha
    double plus_integral = 0.0;  ///< integral of F over Omega+ = {u in [0, t0) : F > 0}
    double minus_integral = 0.0; ///< integral of F over Omega- = {u in [0, t0) : F < 0}
    double plus_measure = 0.0;
    double minus_measure = 0.0;
    double fprime_integral = 0.0;
    std::vector<InequalityRecord> records;
};

/// Throws NotApplicable when every window of length pi/2 holds a critical angle.
SignSetReport verify_sign_set_inequalities(const HarmonicSplit& split);

/// I(beta) = int h'^2 / int h^2 for h = x sin(beta) - y cos(beta), x = R cos(phi), y = R sin(phi),
/// with h' computed spectrally. Throws ZeroProjection when ||h|| < 1e-12.
double projection_I(const CurveGeometry& geom, std::span<const double> R, double beta);

/// I(beta) for many beta from six precomputed moments of (x, y, x', y').
class ProjectionQuotient {
public:
    ProjectionQuotient(const CurveGeometry& geom, std::span<const double> R);
    double operator()(double beta) const;

private:
    double xx_ = 0, yy_ = 0, xy_ = 0;
    double dxx_ = 0, dyy_ = 0, dxy_ = 0;
};

struct ReportOptions {
    double lambda_tol = 1e-7; ///< converge_lambda tolerance and slack on the lambda comparisons
    double slack = 1e-5;      ///< default slack for proof-chain inequalities
    int beta_count = 360;
    int quad_N = 1 << 16;
    int alpha_resolution = 4096;
    ConvergeOptions converge{};
    bool rerun_on_failure = true;
};

struct BoundReport {
    std::vector<InequalityRecord> records;
    double alpha_star = 0.0;
    double lambda_lower_bound = 1.0; ///< (1 + 2 alpha*/pi)^-2
    double lambda_computed = 0.0;
    bool theorem2_applicable = true;
    double max_gap = 0.0;
    CriticalAngleSet critical;
    SpectralResult spectral;
    std::optional<SignSetReport> sign_sets;
    bool rerun = false; ///< a first pass failed and this is the doubled-resolution pass

    bool passed() const;
    const InequalityRecord* find(const std::string& name) const;
};

/// Runs every verification and the lambda computation for one curve.
BoundReport full_report(const CurveSpec& spec, const ReportOptions& options = {});

} // namespace ovalspec
