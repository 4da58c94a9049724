#include "walkfit/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace walkfit {

namespace {

std::string format_double(double v) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view field, const std::string& context) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw IoError("malformed number '" + std::string(field) + "' in " +
                      context);
    }
    if (!std::isfinite(v)) {
        throw IoError("non-finite value in " + context);
    }
    return v;
}

std::int64_t parse_int(std::string_view field, const std::string& context) {
    std::int64_t v = 0;
    const auto res =
        std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw IoError("malformed integer '" + std::string(field) + "' in " +
                      context);
    }
    return v;
}

// Splits a CSV line into exactly n_fields pieces (no quoting; the formats
// here never need it).
std::vector<std::string_view> split_fields(std::string_view line,
                                           std::size_t n_fields,
                                           const std::string& context) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
    if (fields.size() != n_fields) {
        throw IoError("expected " + std::to_string(n_fields) + " columns in " +
                      context);
    }
    return fields;
}

std::string chomp(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path);
    }
    return in;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open file for writing: " + path);
    }
    out << contents;
    out.flush();
    if (!out) {
        throw IoError("failed to write file: " + path);
    }
}

} // namespace

Trajectory read_trajectory(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || chomp(line) != "t,x,y") {
        throw IoError("malformed header in " + path + " (expected 't,x,y')");
    }
    std::vector<double> ts;
    std::vector<double> xs;
    std::vector<double> ys;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = chomp(std::move(line));
        if (line.empty()) continue;
        const std::string context = path + ":" + std::to_string(line_no);
        const auto fields = split_fields(line, 3, context);
        ts.push_back(parse_double(fields[0], context));
        xs.push_back(parse_double(fields[1], context));
        ys.push_back(parse_double(fields[2], context));
    }
    if (ts.size() < 2) {
        throw IoError("trajectory file needs at least two rows: " + path);
    }
    const double dt = ts[1] - ts[0];
    if (!(dt > 0.0)) {
        throw IoError("time column must be strictly increasing: " + path);
    }
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        const double step = ts[i + 1] - ts[i];
        if (std::abs(step - dt) > 1e-9 * dt) {
            throw IoError("non-uniform time grid near row " +
                          std::to_string(i + 2) + " of " + path);
        }
    }
    Trajectory traj;
    traj.dt = dt;
    traj.xs = std::move(xs);
    traj.ys = std::move(ys);
    traj.validate();
    return traj;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
    traj.validate();
    std::string out = "t,x,y\n";
    out.reserve(out.size() + traj.xs.size() * 48);
    for (std::size_t i = 0; i < traj.xs.size(); ++i) {
        out += format_double(static_cast<double>(i) * traj.dt);
        out += ',';
        out += format_double(traj.xs[i]);
        out += ',';
        out += format_double(traj.ys[i]);
        out += '\n';
    }
    write_file(path, out);
}

MomentCurve read_moments(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || chomp(line) != "t_s,m2,m4,n_pairs") {
        throw IoError("malformed header in " + path +
                      " (expected 't_s,m2,m4,n_pairs')");
    }
    MomentCurve curve;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = chomp(std::move(line));
        if (line.empty()) continue;
        const std::string context = path + ":" + std::to_string(line_no);
        const auto fields = split_fields(line, 4, context);
        curve.lags.t_s.push_back(parse_double(fields[0], context));
        curve.m2.push_back(parse_double(fields[1], context));
        curve.m4.push_back(parse_double(fields[2], context));
        curve.n_pairs.push_back(parse_int(fields[3], context));
    }
    if (curve.lags.t_s.empty()) {
        throw IoError("moments file has no rows: " + path);
    }
    return curve;
}

void write_moments(const MomentCurve& curve, const std::string& path) {
    const std::size_t n = curve.lags.size();
    if (curve.m2.size() != n || curve.m4.size() != n ||
        curve.n_pairs.size() != n) {
        throw std::invalid_argument("moment curve arrays have unequal lengths");
    }
    if (n == 0) {
        throw std::invalid_argument("refusing to write an empty moment curve");
    }
    std::string out = "t_s,m2,m4,n_pairs\n";
    for (std::size_t i = 0; i < n; ++i) {
        out += format_double(curve.lags.t_s[i]);
        out += ',';
        out += format_double(curve.m2[i]);
        out += ',';
        out += format_double(curve.m4[i]);
        out += ',';
        out += std::to_string(curve.n_pairs[i]);
        out += '\n';
    }
    write_file(path, out);
}

namespace {

using ordered_json = nlohmann::ordered_json;

const char* model_name(ModelKind kind) {
    return kind == ModelKind::Intermittent ? "is" : "levy";
}

ModelKind model_from_name(const std::string& name) {
    if (name == "is") return ModelKind::Intermittent;
    if (name == "levy") return ModelKind::Levy;
    throw IoError("unknown model name: " + name);
}

ordered_json params_to_json(const ModelParams& params) {
    ordered_json j;
    if (const auto* is = std::get_if<IsParams>(&params)) {
        j["D"] = is->diffusion_coeff;
        j["vb"] = is->ballistic_speed;
        j["lbd"] = is->rate_bd;
        j["ldb"] = is->rate_db;
    } else {
        const auto& lw = std::get<LwParams>(params);
        j["tau0"] = lw.tau0;
        j["gamma"] = lw.levy_exponent;
        j["v"] = lw.speed;
    }
    return j;
}

ModelParams params_from_json(ModelKind kind, const ordered_json& j) {
    if (kind == ModelKind::Intermittent) {
        return IsParams{j.at("D").get<double>(), j.at("vb").get<double>(),
                        j.at("lbd").get<double>(), j.at("ldb").get<double>()};
    }
    return LwParams{j.at("tau0").get<double>(), j.at("gamma").get<double>(),
                    j.at("v").get<double>()};
}

template <std::size_t N>
ordered_json bounds_to_json(const std::optional<std::array<Interval, N>>& bounds) {
    if (!bounds) return nullptr;
    ordered_json arr = ordered_json::array();
    for (const auto& iv : *bounds) {
        arr.push_back(ordered_json::array({iv.lo, iv.hi}));
    }
    return arr;
}

template <std::size_t N>
std::optional<std::array<Interval, N>> bounds_from_json(const ordered_json& j) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_array() || j.size() != N) {
        throw IoError("bounds array has the wrong shape");
    }
    std::array<Interval, N> bounds;
    for (std::size_t i = 0; i < N; ++i) {
        bounds[i] = Interval{j[i].at(0).get<double>(), j[i].at(1).get<double>()};
    }
    return bounds;
}

ordered_json config_to_json(const FitConfig& config) {
    ordered_json j;
    j["n_starts"] = config.n_starts;
    j["max_iters"] = config.max_iters;
    j["tolerance"] = config.tolerance;
    j["param_tolerance"] = config.param_tolerance;
    j["ensemble_size"] = config.ensemble_size;
    j["ensemble_seed"] =
        config.ensemble_seed ? ordered_json(*config.ensemble_seed) : nullptr;
    j["fresh_ensemble_per_eval"] = config.fresh_ensemble_per_eval;
    j["n_workers"] = config.n_workers;
    j["is_bounds"] = bounds_to_json(config.is_bounds);
    j["lw_bounds"] = bounds_to_json(config.lw_bounds);
    return j;
}

FitConfig config_from_json(const ordered_json& j) {
    FitConfig config;
    config.n_starts = j.at("n_starts").get<int>();
    config.max_iters = j.at("max_iters").get<int>();
    config.tolerance = j.at("tolerance").get<double>();
    config.param_tolerance = j.at("param_tolerance").get<double>();
    config.ensemble_size = j.at("ensemble_size").get<int>();
    if (!j.at("ensemble_seed").is_null()) {
        config.ensemble_seed = j.at("ensemble_seed").get<std::uint64_t>();
    }
    config.fresh_ensemble_per_eval = j.at("fresh_ensemble_per_eval").get<bool>();
    config.n_workers = j.at("n_workers").get<int>();
    config.is_bounds = bounds_from_json<4>(j.at("is_bounds"));
    config.lw_bounds = bounds_from_json<3>(j.at("lw_bounds"));
    return config;
}

ordered_json curve_to_json(const MomentCurve& curve) {
    ordered_json j;
    j["t_s"] = curve.lags.t_s;
    j["m2"] = curve.m2;
    j["m4"] = curve.m4;
    j["n_pairs"] = curve.n_pairs;
    return j;
}

MomentCurve curve_from_json(const ordered_json& j) {
    MomentCurve curve;
    curve.lags.t_s = j.at("t_s").get<std::vector<double>>();
    curve.m2 = j.at("m2").get<std::vector<double>>();
    curve.m4 = j.at("m4").get<std::vector<double>>();
    curve.n_pairs = j.at("n_pairs").get<std::vector<std::int64_t>>();
    return curve;
}

ordered_json fit_body_to_json(const FitReport& report) {
    ordered_json j;
    j["model"] = model_name(report.model);
    j["params"] = params_to_json(report.params);
    j["objective"] = report.objective;
    j["r2_adjusted"] = report.r2_adjusted;
    j["per_lag_d2"] = report.per_lag_d2;
    j["per_lag_d4"] = report.per_lag_d4;
    j["n_starts_converged"] = report.n_starts_converged;
    j["config_echo"] = config_to_json(report.config_echo);
    return j;
}

FitReport fit_body_from_json(const ordered_json& j) {
    FitReport report;
    report.model = model_from_name(j.at("model").get<std::string>());
    report.params = params_from_json(report.model, j.at("params"));
    report.objective = j.at("objective").get<double>();
    report.r2_adjusted = j.at("r2_adjusted").get<double>();
    report.per_lag_d2 = j.at("per_lag_d2").get<std::vector<double>>();
    report.per_lag_d4 = j.at("per_lag_d4").get<std::vector<double>>();
    report.n_starts_converged = j.at("n_starts_converged").get<int>();
    report.config_echo = config_from_json(j.at("config_echo"));
    return report;
}

void check_format_version(const ordered_json& j) {
    if (!j.contains("format_version") || j.at("format_version") != 1) {
        throw IoError("unsupported report format_version (expected 1)");
    }
}

ordered_json read_json_file(const std::string& path) {
    std::ifstream in = open_input(path);
    try {
        return ordered_json::parse(in);
    } catch (const ordered_json::exception& e) {
        throw IoError("invalid JSON in " + path + ": " + e.what());
    }
}

} // namespace

nlohmann::ordered_json to_json(const FitReport& report) {
    ordered_json j;
    j["format_version"] = 1;
    ordered_json body = fit_body_to_json(report);
    for (auto& [key, value] : body.items()) {
        j[key] = std::move(value);
    }
    return j;
}

nlohmann::ordered_json to_json(const ClassificationReport& report) {
    ordered_json j;
    j["format_version"] = 1;
    j["gamma"] = report.gamma;
    j["label"] =
        report.label == ModelKind::Intermittent ? "intermittent" : "levy";
    j["fit_is"] = fit_body_to_json(report.fit_is);
    j["fit_lw"] = fit_body_to_json(report.fit_lw);
    j["data_curve"] = curve_to_json(report.data_curve);
    return j;
}

FitReport fit_report_from_json(const nlohmann::ordered_json& j) {
    check_format_version(j);
    return fit_body_from_json(j);
}

ClassificationReport classification_from_json(const nlohmann::ordered_json& j) {
    check_format_version(j);
    ClassificationReport report;
    report.gamma = j.at("gamma").get<double>();
    const std::string label = j.at("label").get<std::string>();
    if (label == "intermittent") {
        report.label = ModelKind::Intermittent;
    } else if (label == "levy") {
        report.label = ModelKind::Levy;
    } else {
        throw IoError("unknown label: " + label);
    }
    report.fit_is = fit_body_from_json(j.at("fit_is"));
    report.fit_lw = fit_body_from_json(j.at("fit_lw"));
    report.data_curve = curve_from_json(j.at("data_curve"));
    return report;
}

void write_report(const FitReport& report, const std::string& path) {
    write_file(path, to_json(report).dump(2) + "\n");
}

void write_report(const ClassificationReport& report, const std::string& path) {
    write_file(path, to_json(report).dump(2) + "\n");
}

FitReport read_fit_report(const std::string& path) {
    try {
        return fit_report_from_json(read_json_file(path));
    } catch (const ordered_json::exception& e) {
        throw IoError("invalid report in " + path + ": " + e.what());
    }
}

ClassificationReport read_classification_report(const std::string& path) {
    try {
        return classification_from_json(read_json_file(path));
    } catch (const ordered_json::exception& e) {
        throw IoError("invalid report in " + path + ": " + e.what());
    }
}

} // namespace walkfit
