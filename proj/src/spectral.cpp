#include "ovalspec/spectral.hpp"

#include "ovalspec/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ovalspec {

namespace {

constexpr int kMaxInverseIterations = 500;
constexpr double kResidualTarget = 1e-8;

// Factorization of the symmetric cyclic tridiagonal matrix with diagonal d_i and constant
// off-diagonal e (including the two wraparound corners), solved by Sherman-Morrison on top
// of a Thomas factorization.
class CyclicTridiagonal {
public:
    CyclicTridiagonal(std::vector<double> diag, double off) : n_(diag.size()), e_(off) {
        gamma_ = -diag[0];
        diag[0] -= gamma_;
        diag[n_ - 1] -= e_ * e_ / gamma_;
        // Thomas forward sweep with sub = super = e.
        cprime_.resize(n_);
        denom_.resize(n_);
        denom_[0] = diag[0];
        cprime_[0] = e_ / denom_[0];
        for (std::size_t i = 1; i < n_; ++i) {
            denom_[i] = diag[i] - e_ * cprime_[i - 1];
            cprime_[i] = e_ / denom_[i];
        }
        std::vector<double> u(n_, 0.0);
        u[0] = gamma_;
        u[n_ - 1] = e_;
        z_ = thomas(u);
        z_scale_ = 1.0 + z_[0] + e_ * z_[n_ - 1] / gamma_;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        std::vector<double> r(rhs.data(), rhs.data() + n_);
        std::vector<double> x = thomas(r);
        const double fact = (x[0] + e_ * x[n_ - 1] / gamma_) / z_scale_;
        Eigen::VectorXd out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = x[i] - fact * z_[i];
        return out;
    }

private:
    std::vector<double> thomas(const std::vector<double>& r) const {
        std::vector<double> y(n_);
        y[0] = r[0] / denom_[0];
        for (std::size_t i = 1; i < n_; ++i) y[i] = (r[i] - e_ * y[i - 1]) / denom_[i];
        for (std::size_t i = n_ - 1; i-- > 0;) y[i] -= cprime_[i] * y[i + 1];
        return y;
    }

    std::size_t n_;
    double e_;
    double gamma_ = 0.0;
    std::vector<double> cprime_;
    std::vector<double> denom_;
    std::vector<double> z_;
    double z_scale_ = 1.0;
};

// psi^T H psi for unit-free psi, written as a sum of squares so that no cancellation occurs.
double quadratic_form(const DiscretizedOperator& op, const Eigen::VectorXd& psi) {
    const int N = op.N;
    double potential = 0.0;
    for (int i = 0; i < N; ++i) potential += op.potential[i] * psi[i] * psi[i];
    double kinetic = 0.0;
    if (op.scheme == Scheme::CentralDifference2) {
        for (int i = 0; i < N; ++i) {
            const double d = psi[(i + 1) % N] - psi[i];
            kinetic += d * d;
        }
        kinetic /= op.h * op.h;
    } else {
        Eigen::FFT<double> fft;
        std::vector<double> in(psi.data(), psi.data() + N);
        std::vector<std::complex<double>> spec;
        fft.fwd(spec, in);
        for (int j = 0; j < N; ++j) {
            const double k = j <= N / 2 ? j : j - N;
            kinetic += k * k * std::norm(spec[j]);
        }
        kinetic /= N;
    }
    return kinetic + potential;
}

// Shared inverse iteration; `solve` applies H^-1.
template <class Solver>
SpectralResult inverse_iteration(const DiscretizedOperator& op, const Solver& solve) {
    const int N = op.N;
    Eigen::VectorXd v = Eigen::VectorXd::Constant(N, 1.0 / std::sqrt(static_cast<double>(N)));
    double lambda = quadratic_form(op, v);
    const double op_norm = 4.0 / (op.h * op.h) * (op.scheme == Scheme::FourierCollocation ? 2.5 : 1.0) +
                           *std::max_element(op.potential.begin(), op.potential.end());
    // Roundoff floor of ||Hv - lambda v|| for a unit vector.
    const double residual_tol = std::max(kResidualTarget, 64.0 * std::numeric_limits<double>::epsilon() * op_norm);

    SpectralResult result;
    result.N = N;
    result.scheme = op.scheme;
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < kMaxInverseIterations; ++it) {
        Eigen::VectorXd w = solve(v);
        v = w / w.norm();
        const double next = quadratic_form(op, v);
        residual = (op.apply(v) - next * v).norm();
        const double increment = std::abs(next - lambda);
        lambda = next;
        if (increment < 1e-12 * std::max(1.0, std::abs(lambda)) && residual < residual_tol) break;
    }
    if (it == kMaxInverseIterations) {
        throw NoConvergence("inverse iteration did not converge at N = " + std::to_string(N) +
                            " (residual " + std::to_string(residual) + ")");
    }
    if (v.sum() < 0.0) v = -v;
    if (v.minCoeff() <= 0.0) {
        throw NodalGroundState("ground state changes sign at N = " + std::to_string(N));
    }
    const double scale = 1.0 / std::sqrt(op.h);
    result.R.resize(N);
    for (int i = 0; i < N; ++i) result.R[i] = v[i] * scale;
    result.lambda = lambda;
    result.extrapolated_lambda = lambda;
    result.residual_norm = residual;
    result.iterations = it + 1;
    return result;
}

// phi at 2N from phi at N: even nodes coincide.
std::vector<double> refine_phi(const CurveSpec& spec, const std::vector<double>& coarse) {
    const std::size_t N = coarse.size();
    std::vector<double> fine(2 * N);
    const double h = kTwoPi / static_cast<double>(2 * N);
    for (std::size_t i = 0; i < N; ++i) {
        fine[2 * i] = coarse[i];
        fine[2 * i + 1] = eval_phi(spec, static_cast<double>(2 * i + 1) * h);
    }
    return fine;
}

std::vector<double> coarsen_phi(const std::vector<double>& fine) {
    std::vector<double> coarse(fine.size() / 2);
    for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = fine[2 * i];
    return coarse;
}

// Solve at the resolution of `phi`; a nodal ground state triggers one doubling.
SpectralResult solve_refining_once(const CurveSpec& spec, std::vector<double>& phi, Scheme scheme) {
    try {
        return ground_state(assemble_from_phi(spec, phi, scheme));
    } catch (const NodalGroundState&) {
        phi = refine_phi(spec, phi);
        return ground_state(assemble_from_phi(spec, phi, scheme));
    }
}

} // namespace

std::string to_string(Scheme scheme) {
    return scheme == Scheme::CentralDifference2 ? "CentralDifference2" : "FourierCollocation";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "cd2" || name == "CD2" || name == "CentralDifference2") return Scheme::CentralDifference2;
    if (name == "collocation" || name == "FourierCollocation") return Scheme::FourierCollocation;
    throw FormatError("unknown scheme '" + name + "'");
}

Eigen::MatrixXd spectral_second_derivative(int N) {
    if (N % 2 != 0) throw Error("spectral_second_derivative: N must be even");
    const double h = kTwoPi / N;
    Eigen::MatrixXd D(N, N);
    const double diag = -std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            if (i == j) {
                D(i, j) = diag;
            } else {
                const int k = i - j;
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                const double sn = std::sin(0.5 * k * h);
                D(i, j) = -sign / (2.0 * sn * sn);
            }
        }
    }
    return D;
}

Eigen::VectorXd DiscretizedOperator::apply(const Eigen::VectorXd& psi) const {
    Eigen::VectorXd out(N);
    if (scheme == Scheme::CentralDifference2) {
        const double inv_h2 = 1.0 / (h * h);
        for (int i = 0; i < N; ++i) {
            const double left = psi[(i + N - 1) % N];
            const double right = psi[(i + 1) % N];
            out[i] = (2.0 * psi[i] - left - right) * inv_h2 + potential[i] * psi[i];
        }
    } else {
        out.noalias() = collocation * psi;
    }
    return out;
}

Eigen::MatrixXd DiscretizedOperator::dense() const {
    if (scheme == Scheme::FourierCollocation) return collocation;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    const double inv_h2 = 1.0 / (h * h);
    for (int i = 0; i < N; ++i) {
        A(i, i) = 2.0 * inv_h2 + potential[i];
        A(i, (i + 1) % N) -= inv_h2;
        A(i, (i + N - 1) % N) -= inv_h2;
    }
    return A;
}

DiscretizedOperator assemble_from_phi(const CurveSpec& spec, std::span<const double> phi, Scheme scheme) {
    const int N = static_cast<int>(phi.size());
    if (N < 16) throw Error("assemble: N must be at least 16");
    if (scheme == Scheme::FourierCollocation && N % 2 != 0) throw Error("assemble: collocation needs even N");
    DiscretizedOperator op;
    op.N = N;
    op.h = kTwoPi / N;
    op.scheme = scheme;
    op.potential.resize(N);
    for (int i = 0; i < N; ++i) {
        const double kappa = 1.0 / spec.phi_inverse_derivative(phi[i]);
        op.potential[i] = kappa * kappa;
    }
    if (scheme == Scheme::FourierCollocation) {
        op.collocation = -spectral_second_derivative(N);
        op.collocation.diagonal() += Eigen::Map<const Eigen::VectorXd>(op.potential.data(), N);
    }
    return op;
}

DiscretizedOperator assemble(const CurveSpec& spec, int N, Scheme scheme) {
    if (N < 16) throw Error("assemble: N must be at least 16");
    const auto phi = sample_phi(spec, N);
    return assemble_from_phi(spec, phi, scheme);
}

SpectralResult ground_state(const DiscretizedOperator& op) {
    if (op.scheme == Scheme::CentralDifference2) {
        std::vector<double> diag(op.N);
        const double inv_h2 = 1.0 / (op.h * op.h);
        for (int i = 0; i < op.N; ++i) diag[i] = 2.0 * inv_h2 + op.potential[i];
        const CyclicTridiagonal factor(std::move(diag), -inv_h2);
        return inverse_iteration(op, [&](const Eigen::VectorXd& v) { return factor.solve(v); });
    }
    const Eigen::LLT<Eigen::MatrixXd> factor(op.collocation);
    if (factor.info() != Eigen::Success) throw NoConvergence("collocation matrix is not positive definite");
    return inverse_iteration(op, [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return factor.solve(v); });
}

std::vector<double> full_spectrum(const DiscretizedOperator& op) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense(), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double rayleigh_quotient(const DiscretizedOperator& op, std::span<const double> psi) {
    if (static_cast<int>(psi.size()) != op.N) throw Error("rayleigh_quotient: size mismatch");
    const Eigen::Map<const Eigen::VectorXd> v(psi.data(), op.N);
    const double norm2 = v.squaredNorm();
    if (!(norm2 > 0.0)) throw ZeroVector("rayleigh_quotient: trial function is identically zero");
    return quadratic_form(op, v) / norm2;
}

SpectralResult lambda_at(const CurveSpec& spec, int N, Scheme scheme) {
    std::vector<double> phi = sample_phi(spec, N);
    if (scheme == Scheme::FourierCollocation) return solve_refining_once(spec, phi, scheme);
    std::vector<double> coarse = coarsen_phi(phi);
    const SpectralResult low = solve_refining_once(spec, coarse, scheme);
    SpectralResult high = solve_refining_once(spec, phi, scheme);
    high.extrapolated_lambda = high.lambda + (high.lambda - low.lambda) / 3.0;
    high.extrapolation_error = std::abs(high.lambda - low.lambda) / 3.0;
    return high;
}

SpectralResult converge_lambda(const CurveSpec& spec, double tol, const ConvergeOptions& options) {
    if (!(tol >= 1e-10)) throw Error("converge_lambda: tolerance must be at least 1e-10");
    std::vector<double> phi = sample_phi(spec, options.start_N);
    SpectralResult prev = solve_refining_once(spec, phi, options.scheme);
    std::optional<double> prev_extrapolated;
    SpectralResult cur;
    while (true) {
        if (2 * static_cast<long>(phi.size()) > options.max_N) {
            throw BudgetExceeded("converge_lambda: N would exceed " + std::to_string(options.max_N) +
                                 " before |dlambda| < " + std::to_string(tol));
        }
        phi = refine_phi(spec, phi);
        cur = solve_refining_once(spec, phi, options.scheme);
        const double delta = cur.lambda - prev.lambda;
        bool converged = std::abs(delta) < tol;
        if (options.scheme == Scheme::CentralDifference2) {
            cur.extrapolated_lambda = cur.lambda + delta / 3.0;
            cur.extrapolation_error = prev_extrapolated ? std::abs(cur.extrapolated_lambda - *prev_extrapolated)
                                                        : std::abs(delta) / 3.0;
            // Successive Richardson values settle at O(h^4), long before the raw O(h^2) increments.
            if (prev_extrapolated && cur.extrapolation_error < tol) converged = true;
            prev_extrapolated = cur.extrapolated_lambda;
        } else {
            cur.extrapolated_lambda = cur.lambda;
            cur.extrapolation_error = std::abs(delta);
        }
        if (converged) break;
        prev = std::move(cur);
    }
    if (options.cross_check_max_N > 0) {
        int check_N = std::min(cur.N, options.cross_check_max_N);
        check_N = std::max(check_N, 16);
        const Scheme other = options.scheme == Scheme::CentralDifference2 ? Scheme::FourierCollocation
                                                                          : Scheme::CentralDifference2;
        const SpectralResult check = lambda_at(spec, check_N, other);
        cur.cross_check_lambda = check.extrapolated_lambda;
        cur.cross_check_N = check.N;
        cur.scheme_discrepancy = std::abs(cur.extrapolated_lambda - check.extrapolated_lambda);
    }
    return cur;
}

} // namespace ovalspec
