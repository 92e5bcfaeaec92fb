#pragma once

#include "ovalspec/curve.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ovalspec {

enum class Scheme { CentralDifference2, FourierCollocation };

std::string to_string(Scheme scheme);
/// Accepts "cd2" / "CentralDifference2" and "collocation" / "FourierCollocation".
Scheme scheme_from_string(const std::string& name);

/// H = -d^2/ds^2 + kappa^2(s) on the periodic grid s_i = i h, h = 2 pi / N.
struct DiscretizedOperator {
    int N = 0;
    double h = 0.0;
    std::vector<double> potential; ///< kappa^2(s_i)
    Scheme scheme = Scheme::CentralDifference2;
    /// Full matrix for FourierCollocation; empty for CentralDifference2.
    Eigen::MatrixXd collocation;

    Eigen::VectorXd apply(const Eigen::VectorXd& psi) const;
    /// Explicit symmetric matrix of either scheme.
    Eigen::MatrixXd dense() const;
};

/// Periodic spectral second-derivative matrix on N (even) equispaced points.
Eigen::MatrixXd spectral_second_derivative(int N);

DiscretizedOperator assemble(const CurveSpec& spec, int N, Scheme scheme);
/// Same, from precomputed tangent angles phi(s_i).
DiscretizedOperator assemble_from_phi(const CurveSpec& spec, std::span<const double> phi, Scheme scheme);

struct SpectralResult {
    double lambda = 0.0;
    double extrapolated_lambda = 0.0;
    /// Error gauge of extrapolated_lambda; 0 when no extrapolation was done.
    double extrapolation_error = 0.0;
    int N = 0;
    Scheme scheme = Scheme::CentralDifference2;
    double residual_norm = 0.0;
    int iterations = 0;
    /// Ground state samples, positive, with h * sum R^2 = 1.
    std::vector<double> R;
    /// Lowest eigenvalue from the other scheme, filled by converge_lambda.
    std::optional<double> cross_check_lambda;
    std::optional<int> cross_check_N;
    std::optional<double> scheme_discrepancy;
};

/// Lowest eigenpair by shifted-at-zero inverse iteration with Rayleigh-quotient estimates.
/// Throws NoConvergence (500 iterations) or NodalGroundState.
SpectralResult ground_state(const DiscretizedOperator& op);

/// Every eigenvalue of the dense matrix, ascending. Test oracle; O(N^3).
std::vector<double> full_spectrum(const DiscretizedOperator& op);

/// psi^T H psi / psi^T psi. Throws ZeroVector.
double rayleigh_quotient(const DiscretizedOperator& op, std::span<const double> psi);

struct ConvergeOptions {
    Scheme scheme = Scheme::CentralDifference2;
    int start_N = 64;
    int max_N = 1 << 16;
    /// The other scheme is solved at min(final N, this) for the cross-check; 0 disables it.
    int cross_check_max_N = 512;
};

/// Doubles N from start_N until |lambda(2N) - lambda(N)| < tol. For CD2 the returned
/// extrapolated_lambda is the order-2 Richardson combination of the last two levels, and the
/// loop also stops once two successive extrapolated values differ by less than tol.
/// Throws BudgetExceeded when N would exceed max_N.
SpectralResult converge_lambda(const CurveSpec& spec, double tol, const ConvergeOptions& options = {});

/// Ground state at a fixed N; for CD2 also solves N/2 and Richardson-extrapolates.
SpectralResult lambda_at(const CurveSpec& spec, int N, Scheme scheme = Scheme::CentralDifference2);

} // namespace ovalspec
