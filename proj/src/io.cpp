#include "ovalspec/io.hpp"

#include "ovalspec/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ovalspec {

namespace {

void dump_into(const Json& value, std::string& out) {
    switch (value.type()) {
    case Json::value_t::object: {
        out += '{';
        bool first = true;
        for (auto it = value.begin(); it != value.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += Json(it.key()).dump();
            out += ':';
            dump_into(it.value(), out);
        }
        out += '}';
        break;
    }
    case Json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (i > 0) out += ',';
            dump_into(value[i], out);
        }
        out += ']';
        break;
    }
    case Json::value_t::number_float: {
        const double v = value.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
            break;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        std::string text(buf);
        // Keep the value a JSON float so it reads back as a double.
        if (text.find_first_of(".eE") == std::string::npos) text += ".0";
        out += text;
        break;
    }
    default:
        out += value.dump();
    }
}

double number_field(const Json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number()) throw FormatError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

} // namespace

std::string dump_json(const Json& value) {
    std::string out;
    dump_into(value, out);
    return out;
}

Json curve_to_json(const CurveSpec& spec) {
    Json harmonics = Json::array();
    for (const auto& h : spec.harmonics()) {
        harmonics.push_back(Json{{"n", h.n}, {"a", h.a}, {"b", h.b}});
    }
    return Json{{"harmonics", harmonics}};
}

std::string curve_to_string(const CurveSpec& spec) { return dump_json(curve_to_json(spec)); }

CurveSpec curve_from_json(const Json& value, double convexity_floor) {
    if (!value.is_object() || !value.contains("harmonics") || !value.at("harmonics").is_array()) {
        throw FormatError("curve JSON must be an object with a 'harmonics' array");
    }
    std::vector<Harmonic> harmonics;
    for (const auto& entry : value.at("harmonics")) {
        if (!entry.is_object()) throw FormatError("each harmonic must be an object");
        for (auto it = entry.begin(); it != entry.end(); ++it) {
            if (it.key() != "n" && it.key() != "a" && it.key() != "b") {
                throw FormatError("unknown harmonic field '" + it.key() + "'");
            }
        }
        if (!entry.contains("n") || !entry.at("n").is_number_integer()) {
            throw FormatError("harmonic entry needs an integer 'n'");
        }
        harmonics.push_back({entry.at("n").get<int>(), number_field(entry, "a", 0.0), number_field(entry, "b", 0.0)});
    }
    return build_curve(std::move(harmonics), convexity_floor);
}

CurveSpec parse_curve(const std::string& text, double convexity_floor) {
    Json value;
    try {
        value = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("curve JSON does not parse: ") + e.what());
    }
    return curve_from_json(value, convexity_floor);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CurveSpec read_curve_file(const std::filesystem::path& path, double convexity_floor) {
    return parse_curve(read_text_file(path), convexity_floor);
}

void write_curve_file(const std::filesystem::path& path, const CurveSpec& spec) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << curve_to_string(spec) << '\n';
    if (!out) throw FormatError("write failed for " + path.string());
}

Json spectral_to_json(const SpectralResult& r) {
    return Json{{"lambda", r.lambda},
                {"extrapolated_lambda", r.extrapolated_lambda},
                {"extrapolation_error", r.extrapolation_error},
                {"N", r.N},
                {"scheme", to_string(r.scheme)},
                {"residual_norm", r.residual_norm},
                {"iterations", r.iterations},
                {"cross_check_lambda", optional_number(r.cross_check_lambda)},
                {"cross_check_N", r.cross_check_N ? Json(*r.cross_check_N) : Json(nullptr)},
                {"scheme_discrepancy", optional_number(r.scheme_discrepancy)}};
}

void write_eigenfunction_csv(std::ostream& out, const CurveSpec& spec, const SpectralResult& result) {
    const CurveGeometry geom = embed(spec, result.N);
    const HarmonicSplit split = split_fg(spec);
    out << "s,R,kappa,x,y,t,f,g\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < geom.size(); ++i) {
        const double t = geom.t[i];
        out << geom.s[i] << ',' << result.R[i] << ',' << geom.kappa[i] << ',' << geom.x[i] << ',' << geom.y[i]
            << ',' << t << ',' << split.f.value(t) << ',' << split.g.value(t) << '\n';
    }
}

Json record_to_json(const InequalityRecord& r) {
    Json j{{"name", r.name}, {"applicable", r.applicable}};
    if (r.applicable) {
        j["lhs"] = r.lhs;
        j["rhs"] = r.rhs;
        j["margin"] = r.margin();
        j["slack"] = r.slack;
        j["strict"] = r.strict;
    }
    j["pass"] = r.pass;
    return j;
}

Json report_to_json(const BoundReport& report) {
    Json records = Json::array();
    for (const auto& r : report.records) records.push_back(record_to_json(r));
    Json angles = Json::array();
    for (std::size_t i = 0; i < report.critical.angles.size(); ++i) {
        angles.push_back(Json{{"t", report.critical.angles[i]}, {"sign_change", bool(report.critical.sign_changes[i])}});
    }
    Json j{{"passed", report.passed()},
           {"rerun", report.rerun},
           {"lambda_computed", report.lambda_computed},
           {"alpha_star", report.alpha_star},
           {"lambda_lower_bound", report.lambda_lower_bound},
           {"theorem1_constant", theorem1_constant()},
           {"theorem2_applicable", report.theorem2_applicable},
           {"max_gap", report.max_gap},
           {"f_identically_zero", report.critical.f_identically_zero},
           {"critical_angles", angles},
           {"spectral", spectral_to_json(report.spectral)},
           {"records", records}};
    if (report.sign_sets) {
        const auto& s = *report.sign_sets;
        j["sign_sets"] = Json{{"shift", s.shift},
                              {"t0", s.t0},
                              {"alpha", s.alpha},
                              {"window_start", s.window_start},
                              {"plus_integral", s.plus_integral},
                              {"minus_integral", s.minus_integral},
                              {"plus_measure", s.plus_measure},
                              {"minus_measure", s.minus_measure},
                              {"fprime_integral", s.fprime_integral}};
    }
    return j;
}

std::string report_table(const BoundReport& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-32s %18s %18s %18s  %s\n", "inequality", "lhs", "rhs", "margin", "status");
    out << line;
    for (const auto& r : report.records) {
        if (!r.applicable) {
            std::snprintf(line, sizeof line, "%-32s %18s %18s %18s  %s\n", r.name.c_str(), "-", "-", "-", "n/a");
        } else {
            std::snprintf(line, sizeof line, "%-32s %18.9f %18.9f %18.9f  %s\n", r.name.c_str(), r.lhs, r.rhs,
                          r.margin(), r.pass ? "PASS" : "FAIL");
        }
        out << line;
    }
    std::snprintf(line, sizeof line, "lambda=%.9f alpha*=%.9f bound=%.9f gap=%.9f theorem2=%s\n",
                  report.lambda_computed, report.alpha_star, report.lambda_lower_bound, report.max_gap,
                  report.theorem2_applicable ? "yes" : "no");
    out << line;
    return out.str();
}

SearchConfig search_config_from_json(const Json& value) {
    if (!value.is_object()) throw FormatError("search config must be a JSON object");
    SearchConfig c;
    try {
        for (auto it = value.begin(); it != value.end(); ++it) {
            const std::string& key = it.key();
            const Json& v = it.value();
            if (key == "max_n") c.max_n = v.get<int>();
            else if (key == "convexity_floor") c.convexity_floor = v.get<double>();
            else if (key == "restarts") c.restarts = v.get<int>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "method") c.method = search_method_from_string(v.get<std::string>());
            else if (key == "eval_tol") c.eval_tol = v.get<double>();
            else if (key == "budget") c.budget = v.get<int>();
            else if (key == "eval_N") c.eval_N = v.get<int>();
            else if (key == "penalty_base") c.penalty_base = v.get<double>();
            else if (key == "initial_step") c.initial_step = v.get<double>();
            else if (key == "start") c.start = curve_from_json(v);
            else if (key == "verify_iterates") c.verify_iterates = v.get<bool>();
            else if (key == "quarantine_margin") c.quarantine_margin = v.get<double>();
            else if (key == "candidates_dir") c.candidates_dir = v.get<std::string>();
            else if (key == "threads") c.threads = v.get<unsigned>();
            else if (key == "count") continue; // frontier size, read by the CLI
            else throw FormatError("unknown search config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad search config value: ") + e.what());
    }
    c.validate();
    return c;
}

Json search_config_to_json(const SearchConfig& c) {
    Json j{{"max_n", c.max_n},
           {"convexity_floor", c.convexity_floor},
           {"restarts", c.restarts},
           {"seed", c.seed},
           {"method", to_string(c.method)},
           {"eval_tol", c.eval_tol},
           {"budget", c.budget},
           {"eval_N", c.eval_N},
           {"penalty_base", c.penalty_base},
           {"initial_step", c.initial_step},
           {"verify_iterates", c.verify_iterates},
           {"quarantine_margin", c.quarantine_margin},
           {"candidates_dir", c.candidates_dir}};
    if (c.start) j["start"] = curve_to_json(*c.start);
    return j;
}

Json search_record_to_json(const SearchRecord& r) {
    Json trace = Json::array();
    for (const auto& p : r.trace) trace.push_back(Json::array({p.evaluation, p.lambda}));
    Json j{{"seed", r.seed},
           {"restart", r.restart},
           {"best_lambda", r.best_lambda},
           {"search_lambda", r.search_lambda},
           {"best_spec", curve_to_json(r.best_spec)},
           {"evaluations", r.evaluations},
           {"boundary_hits", r.boundary_hits},
           {"budget_exhausted", r.budget_exhausted},
           {"theorem2_applicable_at_best", r.theorem2_applicable_at_best},
           {"max_gap_at_best", r.max_gap_at_best},
           {"quarantined", r.quarantined},
           {"candidate_path", r.candidate_path ? Json(*r.candidate_path) : Json(nullptr)},
           {"trace", trace}};
    return j;
}

Json frontier_summary_to_json(const FrontierSummary& s) {
    return Json{{"count", s.count},
                {"min_lambda", s.min_lambda},
                {"max_lambda", s.max_lambda},
                {"bin_edges", s.bin_edges},
                {"histogram", s.histogram},
                {"wide_gap_fraction", s.wide_gap_fraction},
                {"quarantined", s.quarantined},
                {"theorem1_violations", s.theorem1_violations},
                {"theorem2_violations", s.theorem2_violations}};
}

} // namespace ovalspec
