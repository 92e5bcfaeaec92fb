// ovalspec: ground-state energy of -d^2/ds^2 + kappa^2 on closed convex curves.
//
// Exit codes:
//   0  success
//   1  command-line usage error
//   2  unreadable or malformed input (curve file, search config) or unwritable output
//   3  curve is not strictly convex
//   4  eigenvalue computation failed to converge
//   5  verify: at least one inequality failed
//   7  search: a sub-1 candidate survived re-verification (see candidates/)

#include "ovalspec/analysis.hpp"
#include "ovalspec/errors.hpp"
#include "ovalspec/io.hpp"
#include "ovalspec/search.hpp"
#include "ovalspec/spectral.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace ovalspec;

enum Exit : int {
    kOk = 0,
    kUsage = 1,
    kBadInput = 2,
    kNonConvex = 3,
    kNoConvergence = 4,
    kInequalityFailed = 5,
    kCandidate = 7,
};

// Maps library errors onto the documented exit codes.
template <class Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const RejectNonConvex& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::fprintf(stderr, "min (phi^-1)' = %.17g at t = %.17g\n", e.min_derivative, e.argmin);
        return kNonConvex;
    } catch (const NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const NodalGroundState& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    }
}

void print9(double v) { std::printf("%.9f\n", v); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lowest eigenvalue of -d^2/ds^2 + kappa^2 on closed convex curves of length 2pi"};
    app.require_subcommand(1);

    auto* eval = app.add_subcommand("eval", "Print the converged, extrapolated lowest eigenvalue");
    std::string eval_curve;
    double eval_tol = 1e-9;
    std::string eval_scheme = "cd2";
    std::string eval_csv;
    std::string eval_json;
    eval->add_option("curve", eval_curve, "Curve JSON file")->required();
    eval->add_option("--tol", eval_tol, "Stop when |lambda(2N) - lambda(N)| < tol")->check(CLI::Range(1e-10, 1.0));
    eval->add_option("--scheme", eval_scheme, "cd2 or collocation")->check(CLI::IsMember({"cd2", "collocation"}));
    eval->add_option("--emit-eigenfunction", eval_csv, "Write s,R,kappa,x,y,t,f,g CSV here");
    eval->add_option("--json", eval_json, "Write the SpectralResult JSON here");

    auto* critical = app.add_subcommand("critical", "List critical angles and the largest gap");
    std::string critical_curve;
    critical->add_option("curve", critical_curve, "Curve JSON file")->required();

    auto* verify = app.add_subcommand("verify", "Check every inequality of the lower-bound argument");
    std::string verify_curve;
    std::string verify_json;
    double verify_tol = 1e-7;
    verify->add_option("curve", verify_curve, "Curve JSON file")->required();
    verify->add_option("--json", verify_json, "Write the BoundReport JSON here");
    verify->add_option("--tol", verify_tol, "Eigenvalue tolerance")->check(CLI::Range(1e-10, 1e-3));

    auto* search = app.add_subcommand("search", "Minimize lambda over Fourier coefficients");
    std::string search_config;
    std::string search_out = ".";
    int search_count = 0;
    search->add_option("--config", search_config, "SearchConfig JSON file")->required();
    search->add_option("--out-dir", search_out, "Directory for records.jsonl, summary.json, candidates/");
    search->add_option("--count", search_count, "Independent minimizations (overrides config 'count')");

    auto* mkcurve = app.add_subcommand("mkcurve", "Write a random admissible curve");
    std::uint64_t mk_seed = 1;
    int mk_max_n = 7;
    double mk_floor = 0.1;
    std::string mk_out;
    mkcurve->add_option("--seed", mk_seed, "Generator seed");
    mkcurve->add_option("--max-n", mk_max_n, "Highest harmonic")->check(CLI::Range(2, 256));
    mkcurve->add_option("--floor", mk_floor, "Minimum of (phi^-1)'")->check(CLI::Range(1e-6, 0.999));
    mkcurve->add_option("--out", mk_out, "Output file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*eval) {
        return guarded([&] {
            const CurveSpec spec = read_curve_file(eval_curve);
            ConvergeOptions options;
            options.scheme = scheme_from_string(eval_scheme);
            const SpectralResult result = converge_lambda(spec, eval_tol, options);
            print9(result.extrapolated_lambda);
            if (!eval_csv.empty()) {
                std::ofstream out(eval_csv);
                if (!out) throw FormatError("cannot write " + eval_csv);
                write_eigenfunction_csv(out, spec, result);
            }
            if (!eval_json.empty()) {
                std::ofstream out(eval_json);
                if (!out) throw FormatError("cannot write " + eval_json);
                out << dump_json(spectral_to_json(result)) << '\n';
            }
            return static_cast<int>(kOk);
        });
    }

    if (*critical) {
        return guarded([&] {
            const CurveSpec spec = read_curve_file(critical_curve);
            const CriticalAngleSet set = critical_angles(split_fg(spec));
            if (set.f_identically_zero) {
                std::printf("f==0: all angles critical\n");
            }
            for (std::size_t i = 0; i < set.angles.size(); ++i) {
                std::printf("%.12f%s\n", set.angles[i], set.sign_changes[i] ? "" : " tangential");
            }
            const GapResult gap = max_circular_gap(set);
            std::printf("gap=%.9f theorem2=%s\n", gap.gap, gap.theorem2_applicable ? "yes" : "no");
            return static_cast<int>(kOk);
        });
    }

    if (*verify) {
        return guarded([&] {
            const CurveSpec spec = read_curve_file(verify_curve);
            ReportOptions options;
            options.lambda_tol = verify_tol;
            const BoundReport report = full_report(spec, options);
            std::cout << report_table(report);
            if (!verify_json.empty()) {
                std::ofstream out(verify_json);
                if (!out) throw FormatError("cannot write " + verify_json);
                out << dump_json(report_to_json(report)) << '\n';
            }
            if (!report.passed()) {
                for (const auto& r : report.records) {
                    if (!r.pass) std::cerr << "FAILED: " << dump_json(record_to_json(r)) << "\n";
                }
                return static_cast<int>(kInequalityFailed);
            }
            return static_cast<int>(kOk);
        });
    }

    if (*search) {
        return guarded([&] {
            Json raw;
            try {
                raw = Json::parse(read_text_file(search_config));
            } catch (const nlohmann::json::exception& e) {
                throw FormatError(std::string("search config does not parse: ") + e.what());
            }
            SearchConfig config = search_config_from_json(raw);
            int count = search_count;
            if (count <= 0) count = raw.contains("count") ? raw.at("count").get<int>() : 1;
            if (count < 1) throw FormatError("count must be >= 1");
            const std::filesystem::path dir(search_out);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (!config.candidates_dir.empty() && std::filesystem::path(config.candidates_dir).is_relative()) {
                config.candidates_dir = (dir / config.candidates_dir).string();
            }
            std::ofstream records(dir / "records.jsonl");
            if (!records) throw FormatError("cannot write " + (dir / "records.jsonl").string());
            const FrontierSummary summary = frontier_scan(config, count, [&](const SearchRecord& r) {
                records << dump_json(search_record_to_json(r)) << '\n';
            });
            const std::string text = dump_json(frontier_summary_to_json(summary));
            std::ofstream(dir / "summary.json") << text << '\n';
            std::cout << text << '\n';
            return static_cast<int>(summary.quarantined > 0 ? kCandidate : kOk);
        });
    }

    if (*mkcurve) {
        return guarded([&] {
            const CurveSpec spec = random_curve(mk_seed, mk_max_n, mk_floor);
            if (mk_out.empty()) {
                std::cout << curve_to_string(spec) << '\n';
            } else {
                write_curve_file(mk_out, spec);
            }
            return static_cast<int>(kOk);
        });
    }
    return kUsage;
}
