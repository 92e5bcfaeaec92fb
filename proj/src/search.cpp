#include "ovalspec/search.hpp"

#include "ovalspec/analysis.hpp"
#include "ovalspec/errors.hpp"
#include "ovalspec/io.hpp"
#include "ovalspec/spectral.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

namespace ovalspec {

namespace {

constexpr double kTheorem1Slack = 1e-5;

// Raised inside the objective when the evaluation budget is spent.
struct BudgetStop {};

double unit_uniform(std::mt19937_64& rng) {
    // 53 random mantissa bits in (0, 1].
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
    const double u = unit_uniform(rng);
    const double v = unit_uniform(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::vector<Harmonic> to_harmonics(const std::vector<double>& x) {
    std::vector<Harmonic> h;
    for (std::size_t i = 0; i + 1 < x.size(); i += 2) h.push_back({static_cast<int>(i / 2) + 2, x[i], x[i + 1]});
    return h;
}

std::vector<double> to_vector(const CurveSpec& spec, int max_n) {
    std::vector<double> x(2 * static_cast<std::size_t>(max_n - 1), 0.0);
    for (const auto& h : spec.harmonics()) {
        x[2 * (h.n - 2)] = h.a;
        x[2 * (h.n - 2) + 1] = h.b;
    }
    return x;
}

struct RestartOutcome {
    CurveSpec best_spec;
    double best_lambda = std::numeric_limits<double>::infinity();
    std::vector<TracePoint> trace; // local evaluation indices
    int evaluations = 0;
    int boundary_hits = 0;
    bool budget_exhausted = false;
};

class Objective {
public:
    Objective(const SearchConfig& config, int budget, RestartOutcome& out)
        : config_(config), budget_(std::max(budget, 1)), out_(out),
          call_cap_(50L * std::max(budget, 1) + 1000) {}

    double operator()(const std::vector<double>& x) {
        if (++calls_ > call_cap_) stop();
        std::vector<Harmonic> h = to_harmonics(x);
        const double min_derivative = certify_convexity(h).min_derivative;
        if (!(min_derivative > config_.convexity_floor)) {
            ++out_.boundary_hits;
            return config_.penalty_base + (config_.convexity_floor - min_derivative);
        }
        if (out_.evaluations >= budget_) stop();
        const CurveSpec spec = build_curve(std::move(h), 0.0);
        double lambda = lambda_at(spec, config_.eval_N).extrapolated_lambda;
        if (lambda < theorem1_constant() - kTheorem1Slack) {
            lambda = lambda_at(spec, 2 * config_.eval_N).extrapolated_lambda;
            if (lambda < theorem1_constant() - kTheorem1Slack) {
                throw Error("solver failure: lambda = " + std::to_string(lambda) +
                            " lies below the universal lower bound for " + curve_to_string(spec));
            }
        }
        const int index = out_.evaluations++;
        out_.trace.push_back({index, lambda});
        if (lambda < out_.best_lambda) {
            if (config_.verify_iterates) {
                const BoundReport report = full_report(spec);
                if (!report.passed()) {
                    throw Error("iterate fails the inequality suite: " + curve_to_string(spec) + "\n" +
                                report_table(report));
                }
            }
            out_.best_lambda = lambda;
            out_.best_spec = spec;
        }
        return lambda;
    }

private:
    [[noreturn]] void stop() {
        out_.budget_exhausted = true;
        throw BudgetStop{};
    }

    const SearchConfig& config_;
    int budget_;
    RestartOutcome& out_;
    long calls_ = 0;
    long call_cap_;
};

// Nelder-Mead (standard coefficients) from x0; returns when the simplex collapses.
void nelder_mead(Objective& objective, std::vector<double> x0, const std::vector<double>& step) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = objective(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    const auto point = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double coef) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + coef * (worst[k] - centroid[k]);
        return p;
    };
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];
        double size = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(simplex[i][k] - simplex[best][k]));
        }
        if (size < 1e-10 || values[worst] - values[best] < 1e-13) return;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
        }
        const auto reflected = point(centroid, simplex[worst], -1.0);
        const double fr = objective(reflected);
        if (fr < values[best]) {
            const auto expanded = point(centroid, simplex[worst], -2.0);
            const double fe = objective(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const auto contracted = outside ? point(centroid, reflected, 0.5) : point(centroid, simplex[worst], 0.5);
        const double fc = objective(contracted);
        if (fc < std::min(fr, values[worst])) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            values[i] = objective(simplex[i]);
        }
    }
}

// Compass search: +-step along each coordinate, halving all steps after a failed sweep.
void coordinate_pattern(Objective& objective, std::vector<double> x, std::vector<double> step) {
    double fx = objective(x);
    while (*std::max_element(step.begin(), step.end()) > 1e-10) {
        bool improved = false;
        for (std::size_t k = 0; k < x.size(); ++k) {
            for (const double dir : {1.0, -1.0}) {
                std::vector<double> trial = x;
                trial[k] += dir * step[k];
                const double ft = objective(trial);
                if (ft < fx) {
                    x = std::move(trial);
                    fx = ft;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            for (double& s : step) s *= 0.5;
        }
    }
}

RestartOutcome run_restart(const SearchConfig& config, int restart, int budget) {
    RestartOutcome out;
    const CurveSpec start = (restart == 0 && config.start)
                                ? *config.start
                                : random_curve(config.seed ^ static_cast<std::uint64_t>(restart), config.max_n,
                                               config.convexity_floor);
    std::vector<double> x = to_vector(start, config.max_n);
    std::vector<double> step(x.size());
    for (std::size_t i = 0; i < step.size(); ++i) step[i] = config.initial_step / static_cast<double>(i / 2 + 2);

    Objective objective(config, budget, out);
    try {
        objective(x);
        if (budget <= 1) {
            out.budget_exhausted = budget == 0 || out.budget_exhausted;
            return out;
        }
        if (config.method == SearchMethod::CoordinatePattern) {
            coordinate_pattern(objective, x, step);
        } else {
            // Restart from the incumbent with a halved simplex each time Nelder-Mead collapses.
            for (double scale = 1.0; scale > 1e-8; scale *= 0.5) {
                std::vector<double> scaled(step);
                for (double& s : scaled) s *= scale;
                const auto from = std::isfinite(out.best_lambda) ? to_vector(out.best_spec, config.max_n) : x;
                nelder_mead(objective, from, scaled);
            }
        }
    } catch (const BudgetStop&) {
    }
    return out;
}

std::string candidate_file_name(const SearchRecord& record) {
    return "candidate_seed" + std::to_string(record.seed) + "_restart" + std::to_string(record.restart) + ".json";
}

// A sub-1 value is re-checked at N = 8192 (CD2) and with collocation, and persisted.
void quarantine(const SearchConfig& config, SearchRecord& record) {
    const double threshold = 1.0 - config.quarantine_margin;
    if (record.best_lambda >= threshold) return;
    const SpectralResult fine = lambda_at(record.best_spec, 8192, Scheme::CentralDifference2);
    const SpectralResult colloc = lambda_at(record.best_spec, 1024, Scheme::FourierCollocation);
    if (fine.extrapolated_lambda >= threshold || colloc.extrapolated_lambda >= threshold) return;
    record.quarantined = true;
    if (config.candidates_dir.empty()) return;
    const BoundReport report = full_report(record.best_spec);
    std::filesystem::create_directories(config.candidates_dir);
    const auto path = std::filesystem::path(config.candidates_dir) / candidate_file_name(record);
    std::ofstream out(path);
    out << dump_json(Json{{"record", search_record_to_json(record)},
                          {"cd2_N8192", spectral_to_json(fine)},
                          {"collocation_N1024", spectral_to_json(colloc)},
                          {"report", report_to_json(report)}})
        << '\n';
    record.candidate_path = path.string();
}

} // namespace

std::string to_string(SearchMethod method) {
    return method == SearchMethod::NelderMead ? "NelderMead" : "CoordinatePattern";
}

SearchMethod search_method_from_string(const std::string& name) {
    if (name == "NelderMead" || name == "nelder-mead") return SearchMethod::NelderMead;
    if (name == "CoordinatePattern" || name == "pattern") return SearchMethod::CoordinatePattern;
    throw FormatError("unknown search method '" + name + "'");
}

void SearchConfig::validate() const {
    if (max_n < 2) throw FormatError("search config: max_n must be >= 2");
    if (restarts < 1) throw FormatError("search config: restarts must be >= 1");
    if (budget < 0) throw FormatError("search config: budget must be >= 0");
    if (budget > 0 && budget < restarts) throw FormatError("search config: budget must be >= restarts");
    if (!(convexity_floor > 0.0 && convexity_floor < 1.0)) {
        throw FormatError("search config: convexity_floor must lie in (0, 1)");
    }
    if (!(eval_tol >= 1e-10)) throw FormatError("search config: eval_tol must be >= 1e-10");
    if (eval_N < 32 || eval_N % 2 != 0) throw FormatError("search config: eval_N must be even and >= 32");
    if (start && start->max_n() > max_n) throw FormatError("search config: start uses harmonics above max_n");
}

CurveSpec random_curve(std::uint64_t seed, int max_n, double convexity_floor) {
    std::mt19937_64 rng(seed);
    std::vector<Harmonic> h;
    for (int n = 2; n <= max_n; ++n) {
        const double sigma = 0.15 * std::pow(static_cast<double>(n), -1.5);
        const double a = sigma * standard_normal(rng);
        const double b = sigma * standard_normal(rng);
        h.push_back({n, a, b});
    }
    const double min_derivative = certify_convexity(h).min_derivative;
    if (min_derivative < convexity_floor) {
        // (phi^-1)' - 1 is linear in the coefficients.
        const double scale = (1.0 - convexity_floor) / (1.0 - min_derivative) * (1.0 - 1e-6);
        for (auto& term : h) {
            term.a *= scale;
            term.b *= scale;
        }
    }
    return build_curve(std::move(h), std::min(convexity_floor, kDefaultConvexityFloor));
}

SearchRecord minimize_lambda(const SearchConfig& config) {
    config.validate();
    const int restarts = config.budget == 0 ? 1 : config.restarts;
    std::vector<RestartOutcome> outcomes(restarts);
    const unsigned threads = config.threads > 0 ? config.threads : default_threads();
    parallel_for(static_cast<std::size_t>(restarts), threads, [&](std::size_t r) {
        const int share = config.budget / restarts + (static_cast<int>(r) < config.budget % restarts ? 1 : 0);
        outcomes[r] = run_restart(config, static_cast<int>(r), share);
    });

    SearchRecord record;
    record.seed = config.seed;
    int offset = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        const auto& o = outcomes[r];
        for (const auto& p : o.trace) record.trace.push_back({offset + p.evaluation, p.lambda});
        offset += o.evaluations;
        record.boundary_hits += o.boundary_hits;
        record.budget_exhausted = record.budget_exhausted || o.budget_exhausted;
        if (o.best_lambda < best) {
            best = o.best_lambda;
            record.best_spec = o.best_spec;
            record.restart = r;
        }
    }
    record.evaluations = offset;
    record.search_lambda = best;
    ConvergeOptions converge;
    converge.cross_check_max_N = 0;
    record.best_lambda = converge_lambda(record.best_spec, config.eval_tol, converge).extrapolated_lambda;
    if (record.best_lambda < theorem1_constant() - kTheorem1Slack) {
        converge.start_N *= 2;
        record.best_lambda = converge_lambda(record.best_spec, config.eval_tol, converge).extrapolated_lambda;
    }
    const GapResult gap = max_circular_gap(critical_angles(split_fg(record.best_spec)));
    record.theorem2_applicable_at_best = gap.theorem2_applicable;
    record.max_gap_at_best = gap.gap;
    quarantine(config, record);
    return record;
}

FrontierSummary frontier_scan(const SearchConfig& config, int count,
                              const std::function<void(const SearchRecord&)>& sink) {
    config.validate();
    if (count < 1) throw Error("frontier_scan: count must be >= 1");
    std::vector<SearchRecord> records(count);
    const unsigned threads = config.threads > 0 ? config.threads : default_threads();
    parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t k) {
        SearchConfig run = config;
        run.seed = splitmix64(config.seed + k);
        run.threads = 1;
        if (k > 0) run.start.reset();
        records[k] = minimize_lambda(run);
    });

    FrontierSummary summary;
    summary.count = count;
    summary.bin_edges = {0.0, theorem1_constant(), 0.9, 0.99, 0.999, 1.0 - 1e-6, 1.0 + 1e-6, 1.001, 1.01, 1.1, 1.5, 2.0};
    summary.histogram.assign(summary.bin_edges.size(), 0);
    summary.min_lambda = std::numeric_limits<double>::infinity();
    summary.max_lambda = -std::numeric_limits<double>::infinity();
    int wide = 0;
    for (const auto& r : records) {
        summary.min_lambda = std::min(summary.min_lambda, r.best_lambda);
        summary.max_lambda = std::max(summary.max_lambda, r.best_lambda);
        const auto bin = std::upper_bound(summary.bin_edges.begin(), summary.bin_edges.end(), r.best_lambda) -
                         summary.bin_edges.begin() - 1;
        summary.histogram[static_cast<std::size_t>(std::max<long>(bin, 0))]++;
        if (!r.theorem2_applicable_at_best) ++wide;
        if (r.quarantined) ++summary.quarantined;
        if (r.theorem2_applicable_at_best && r.best_lambda < 1.0 - 1e-5) ++summary.theorem2_violations;
        if (r.best_lambda < theorem1_constant() - kTheorem1Slack) ++summary.theorem1_violations;
        if (sink) sink(r);
    }
    summary.wide_gap_fraction = static_cast<double>(wide) / count;
    return summary;
}

} // namespace ovalspec
