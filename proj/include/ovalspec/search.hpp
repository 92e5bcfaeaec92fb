#pragma once

#include "ovalspec/curve.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ovalspec {

enum class SearchMethod { NelderMead, CoordinatePattern };

std::string to_string(SearchMethod method);
SearchMethod search_method_from_string(const std::string& name);

struct SearchConfig {
    int max_n = 7;
    double convexity_floor = 0.05;
    int restarts = 4;
    std::uint64_t seed = 1;
    SearchMethod method = SearchMethod::NelderMead;
    double eval_tol = 1e-8;
    /// Spectral evaluations across all restarts. 0 evaluates the start point only.
    int budget = 400;

    /// Grid used inside the optimizer (CD2 at eval_N/2 and eval_N, Richardson-combined).
    int eval_N = 1024;
    double penalty_base = 1e3;
    /// Initial simplex / pattern step for harmonic n is initial_step / n.
    double initial_step = 0.02;
    /// Start for restart 0; random_curve(seed ^ i) otherwise.
    std::optional<CurveSpec> start;
    /// Run full_report on every improving iterate and fail loudly if it does not pass.
    bool verify_iterates = false;
    /// Values below 1 - quarantine_margin are re-verified and quarantined.
    double quarantine_margin = 1e-6;
    /// Quarantined candidates are written here; empty disables writing.
    std::string candidates_dir = "candidates";
    /// Worker threads for independent restarts; 0 reads OVALSPEC_THREADS (default: hardware).
    unsigned threads = 0;

    /// Throws Error on a violated invariant.
    void validate() const;
};

struct TracePoint {
    int evaluation = 0;
    double lambda = 0.0;
};

struct SearchRecord {
    CurveSpec best_spec;
    double best_lambda = 0.0;   ///< converge_lambda(best_spec, eval_tol), extrapolated
    double search_lambda = 0.0; ///< value the optimizer saw at eval_N
    std::vector<TracePoint> trace;
    int boundary_hits = 0;
    int evaluations = 0;
    bool budget_exhausted = false;
    bool theorem2_applicable_at_best = true;
    double max_gap_at_best = 0.0;
    std::uint64_t seed = 0;
    int restart = 0; ///< restart that produced best_spec
    bool quarantined = false;
    std::optional<std::string> candidate_path;
};

/// Coefficients drawn with standard deviation ~ n^-1.5, then scaled toward the circle until
/// min (phi^-1)' >= convexity_floor. Deterministic per seed on every platform.
CurveSpec random_curve(std::uint64_t seed, int max_n, double convexity_floor);

/// Derivative-free minimization of lambda over the Fourier coefficients n = 2..max_n.
SearchRecord minimize_lambda(const SearchConfig& config);

struct FrontierSummary {
    int count = 0;
    double min_lambda = 0.0;
    double max_lambda = 0.0;
    std::vector<double> bin_edges;  ///< histogram bin boundaries; last bin is open-ended
    std::vector<int> histogram;     ///< size bin_edges.size()
    double wide_gap_fraction = 0.0; ///< fraction of best curves with max_circular_gap > pi/2
    int quarantined = 0;
    /// Records with gap <= pi/2 and lambda < 1 - 1e-5.
    int theorem2_violations = 0;
    int theorem1_violations = 0;
};

/// Runs `count` independent minimizations (seed of run k derived from config.seed and k), in
/// parallel, and hands each record to `sink` in run order.
FrontierSummary frontier_scan(const SearchConfig& config, int count,
                              const std::function<void(const SearchRecord&)>& sink = {});

} // namespace ovalspec
