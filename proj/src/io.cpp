#include "gbevolve/io.hpp"

#include "gbevolve/studies.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

namespace gbevolve {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "schema_version", "alpha1",     "alpha2",       "alpha3",        "B",            "kappa",
        "kbeta",          "image_terms", "dominance_factor", "a",         "d",            "n",
        "scheme",         "dt_init",    "dt_min",       "dt_max",        "cfl_safety",   "t_end",
        "snapshot_stride", "snapshot_interval", "sigma_method", "sigma_eps", "step_tolerance", "growth_after",
        "stability",      "max_steps",  "initial",      "initial_file",  "amplitude",    "smooth_modes",
        "output_dir",     "run_id",     "kappas",       "bs",            "include_zero", "twin_delta",
        "force"};
    return keys;
}

// Line and column (1-based) of a byte offset.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

template <class T>
T get_field(const json& doc, const char* key, T fallback) {
    auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(key) + " has the wrong type");
    }
}

double get_number(const json& doc, const char* key, double fallback) {
    auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    if (!it->is_number()) throw ConfigError(std::string(key) + " must be a number");
    return it->get<double>();
}

long long get_integer(const json& doc, const char* key, long long fallback) {
    auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    if (!it->is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    return it->get<long long>();
}

std::vector<double> get_list(const json& doc, const char* key, std::vector<double> fallback) {
    auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    if (!it->is_array()) throw ConfigError(std::string(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : *it) {
        if (!v.is_number()) throw ConfigError(std::string(key) + " must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::string sigma_name(const SigmaMethod& m) { return to_string(m.kind); }

std::string to_hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

// FNV-1a.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

double parse_double(std::string_view s, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::runtime_error(where + ": not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

Field read_initial_csv(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("initial_file: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,h", 0) != 0) {
        throw ConfigError("initial_file: " + path.string() + " must start with header \"x,h\"");
    }
    std::vector<double> values;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = split_commas(line);
        if (cols.size() != 2) throw ConfigError("initial_file: row " + std::to_string(row) + " needs two columns");
        try {
            values.push_back(parse_double(cols[1], "initial_file row " + std::to_string(row)));
        } catch (const std::runtime_error& e) {
            throw ConfigError(e.what());
        }
    }
    if (values.size() != grid.n) {
        throw ConfigError("initial_file: " + std::to_string(values.size()) + " samples, grid has " +
                          std::to_string(grid.n));
    }
    return Field(grid, std::move(values));
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!known_keys().contains(key)) throw ConfigError("unknown config key \"" + key + "\"");
    }
    if (get_integer(doc, "schema_version", config_schema_version) != config_schema_version) {
        throw ConfigError("schema_version must be " + std::to_string(config_schema_version));
    }

    RunConfig cfg;
    ModelParams& p = cfg.params;
    p.alpha1 = get_number(doc, "alpha1", p.alpha1);
    p.alpha2 = get_number(doc, "alpha2", p.alpha2);
    p.alpha3 = get_number(doc, "alpha3", p.alpha3);
    p.cap_b = get_number(doc, "B", p.cap_b);
    p.kappa = get_number(doc, "kappa", p.kappa);
    p.kbeta = get_number(doc, "kbeta", p.kbeta);
    p.image_terms = static_cast<int>(get_integer(doc, "image_terms", p.image_terms));
    p.dominance_factor = get_number(doc, "dominance_factor", p.dominance_factor);

    const double a = get_number(doc, "a", cfg.grid.a);
    const double d = get_number(doc, "d", cfg.grid.d);
    const long long n = get_integer(doc, "n", static_cast<long long>(cfg.grid.n));
    if (n < 0) throw ConfigError("n must be even and at least 8");

    StepperConfig& s = cfg.stepper;
    const auto scheme_name = get_field<std::string>(doc, "scheme", to_string(s.scheme));
    const auto scheme = scheme_from_string(scheme_name);
    if (!scheme) throw ConfigError("scheme must be \"explicit_euler\" or \"semi_implicit\"");
    s.scheme = *scheme;
    s.dt_init = get_number(doc, "dt_init", s.dt_init);
    s.dt_min = get_number(doc, "dt_min", s.dt_min);
    s.dt_max = get_number(doc, "dt_max", s.dt_max);
    s.cfl_safety = get_number(doc, "cfl_safety", s.cfl_safety);
    s.t_end = get_number(doc, "t_end", s.t_end);
    s.snapshot_stride = static_cast<int>(get_integer(doc, "snapshot_stride", s.snapshot_stride));
    s.snapshot_interval = get_number(doc, "snapshot_interval", s.snapshot_interval);
    s.step_tolerance = get_number(doc, "step_tolerance", s.step_tolerance);
    s.growth_after = static_cast<int>(get_integer(doc, "growth_after", s.growth_after));
    const long long max_steps = get_integer(doc, "max_steps", static_cast<long long>(s.max_steps));
    if (max_steps <= 0) throw ConfigError("max_steps must be positive");
    s.max_steps = static_cast<std::size_t>(max_steps);
    const auto stability = get_field<std::string>(doc, "stability", "enforce");
    if (stability == "enforce") {
        s.stability = StabilityPolicy::enforce;
    } else if (stability == "warn") {
        s.stability = StabilityPolicy::warn;
    } else {
        throw ConfigError("stability must be \"enforce\" or \"warn\"");
    }

    // "auto": kappa-truncated stress when kappa > 0, otherwise the direct P.V. sum.
    const auto sigma = get_field<std::string>(doc, "sigma_method", "auto");
    if (sigma == "auto") {
        s.sigma_method = p.kappa > 0.0 ? SigmaMethod::truncated() : SigmaMethod::direct();
    } else if (const auto kind = sigma_kind_from_string(sigma)) {
        s.sigma_method = {*kind, 0.0};
    } else {
        throw ConfigError("sigma_method must be auto, direct_pv, kappa_truncated or spectral_oracle");
    }
    s.sigma_method.eps = get_number(doc, "sigma_eps", 0.0);
    if (s.sigma_method.eps < 0.0) throw ConfigError("sigma_eps must be nonnegative");
    if (s.sigma_method.kind == SigmaKind::kappa_truncated && s.sigma_method.eps == 0.0 && !(p.kappa > 0.0)) {
        throw ConfigError("sigma_method kappa_truncated needs kappa > 0 or sigma_eps > 0");
    }

    cfg.initial = get_field<std::string>(doc, "initial", cfg.initial);
    cfg.initial_file = get_field<std::string>(doc, "initial_file", cfg.initial_file);
    static const std::set<std::string> presets{"constant", "sine", "multi_mode", "flat_bump", "file"};
    if (!presets.contains(cfg.initial)) {
        throw ConfigError("initial must be one of constant, sine, multi_mode, flat_bump, file");
    }
    if (cfg.initial == "file" && cfg.initial_file.empty()) throw ConfigError("initial_file is required for file");
    cfg.amplitude = get_number(doc, "amplitude", cfg.amplitude);
    if (!std::isfinite(cfg.amplitude)) throw ConfigError("amplitude must be finite");
    const long long smooth = get_integer(doc, "smooth_modes", 0);
    if (smooth < 0) throw ConfigError("smooth_modes must be nonnegative");
    cfg.smooth_modes = static_cast<std::size_t>(smooth);

    cfg.output_dir = get_field<std::string>(doc, "output_dir", cfg.output_dir);
    if (cfg.output_dir.empty()) throw ConfigError("output_dir must not be empty");
    cfg.kappas = get_list(doc, "kappas", cfg.kappas);
    cfg.bs = get_list(doc, "bs", cfg.bs);
    cfg.include_zero = get_field<bool>(doc, "include_zero", cfg.include_zero);
    cfg.twin_delta = get_number(doc, "twin_delta", cfg.twin_delta);
    if (!(cfg.twin_delta > 0.0)) throw ConfigError("twin_delta must be positive");
    cfg.force = get_field<bool>(doc, "force", cfg.force);

    auto check_levels = [](const std::vector<double>& v, const char* key) {
        if (v.empty()) throw ConfigError(std::string(key) + " must not be empty");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(v[i] > 0.0)) throw ConfigError(std::string(key) + " values must be positive");
            if (i > 0 && !(v[i] < v[i - 1])) throw ConfigError(std::string(key) + " values must strictly decrease");
        }
    };
    check_levels(cfg.kappas, "kappas");
    check_levels(cfg.bs, "bs");

    try {
        cfg.grid = make_grid(a, d, static_cast<std::size_t>(n));
        p.validate();
        s.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }

    cfg.run_id = get_field<std::string>(doc, "run_id", "");
    if (cfg.run_id.empty()) {
        json canon = config_to_json(cfg);
        canon.erase("run_id");
        canon.erase("output_dir");
        cfg.run_id = to_hex(fnv1a(canon.dump()));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

json config_to_json(const RunConfig& cfg) {
    const auto& p = cfg.params;
    const auto& s = cfg.stepper;
    json j;
    j["schema_version"] = config_schema_version;
    j["alpha1"] = p.alpha1;
    j["alpha2"] = p.alpha2;
    j["alpha3"] = p.alpha3;
    j["B"] = p.cap_b;
    j["kappa"] = p.kappa;
    j["kbeta"] = p.kbeta;
    j["image_terms"] = p.image_terms;
    j["dominance_factor"] = p.dominance_factor;
    j["a"] = cfg.grid.a;
    j["d"] = cfg.grid.d;
    j["n"] = cfg.grid.n;
    j["scheme"] = to_string(s.scheme);
    j["dt_init"] = s.dt_init;
    j["dt_min"] = s.dt_min;
    j["dt_max"] = s.dt_max;
    j["cfl_safety"] = s.cfl_safety;
    j["t_end"] = s.t_end;
    j["snapshot_stride"] = s.snapshot_stride;
    j["snapshot_interval"] = s.snapshot_interval;
    j["sigma_method"] = sigma_name(s.sigma_method);
    j["sigma_eps"] = s.sigma_method.eps;
    j["step_tolerance"] = s.step_tolerance;
    j["growth_after"] = s.growth_after;
    j["stability"] = s.stability == StabilityPolicy::enforce ? "enforce" : "warn";
    j["max_steps"] = s.max_steps;
    j["initial"] = cfg.initial;
    j["initial_file"] = cfg.initial_file;
    j["amplitude"] = cfg.amplitude;
    j["smooth_modes"] = cfg.smooth_modes;
    j["output_dir"] = cfg.output_dir;
    j["run_id"] = cfg.run_id;
    j["kappas"] = cfg.kappas;
    j["bs"] = cfg.bs;
    j["include_zero"] = cfg.include_zero;
    j["twin_delta"] = cfg.twin_delta;
    j["force"] = cfg.force;
    return j;
}

Field make_initial_field(const RunConfig& cfg) {
    const Grid& g = cfg.grid;
    const double amp = cfg.amplitude;
    const double omega = 2.0 * std::numbers::pi / g.length();
    Field h0 = Field::constant(g, amp);
    if (cfg.initial == "sine") {
        h0 = Field::sample(g, [&](double x) { return amp * std::sin(omega * (x - g.a)); });
    } else if (cfg.initial == "multi_mode") {
        h0 = Field::sample(g, [&](double x) {
            const double th = omega * (x - g.a);
            return amp * (std::sin(th) + 0.5 * std::cos(2.0 * th) + 0.25 * std::sin(3.0 * th));
        });
    } else if (cfg.initial == "flat_bump") {
        h0 = amp * flat_bump(g);
    } else if (cfg.initial == "file") {
        h0 = read_initial_csv(cfg.initial_file, g);
    }
    if (cfg.smooth_modes > 0) h0 = fourier_smooth(h0, cfg.smooth_modes);
    return h0;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    std::string buf = "t,x,h\n";
    for (const auto& snap : traj.snapshots) {
        const std::string t = format_double(snap.t);
        for (std::size_t j = 0; j < snap.h.size(); ++j) {
            buf += t;
            buf += ',';
            buf += format_double(traj.grid.x(j));
            buf += ',';
            buf += format_double(snap.h[j]);
            buf += '\n';
        }
    }
    out << buf;
    finish_write(out, path);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "t,x,h") {
        throw std::runtime_error(path.string() + ": expected header \"t,x,h\"");
    }
    Trajectory traj;
    traj.grid = grid;
    std::vector<double> values;
    double current_t = 0.0;
    std::size_t row = 1;
    auto flush = [&] {
        if (values.empty()) return;
        if (values.size() != grid.n) {
            throw std::runtime_error(path.string() + ": snapshot at t = " + format_double(current_t) + " has " +
                                     std::to_string(values.size()) + " rows, grid has " + std::to_string(grid.n));
        }
        traj.snapshots.push_back({current_t, Field(grid, std::move(values))});
        values.clear();
    };
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cols = split_commas(line);
        const std::string where = path.string() + " row " + std::to_string(row);
        if (cols.size() != 3) throw std::runtime_error(where + ": expected 3 columns");
        const double t = parse_double(cols[0], where);
        const double h = parse_double(cols[2], where);
        if (!values.empty() && t != current_t) flush();
        current_t = t;
        values.push_back(h);
    }
    flush();
    return traj;
}

json report_to_json(const EstimateReport& report, const RunConfig& meta, const Trajectory* traj) {
    json j;
    j["schema_version"] = report_schema_version;
    j["csv_schema_version"] = csv_schema_version;
    j["code_version"] = code_version;
    j["timestamp"] = utc_timestamp();
    j["run_id"] = meta.run_id;
    json values;
    for (const auto& [name, value] : report.entries()) values[name] = value;
    j["report"] = values;
    j["hminus2_multiplier"] = hminus2_multiplier;
    j["params"] = {{"alpha1", meta.params.alpha1},         {"alpha2", meta.params.alpha2},
                   {"alpha3", meta.params.alpha3},         {"B", meta.params.cap_b},
                   {"kappa", meta.params.kappa},           {"kbeta", meta.params.kbeta},
                   {"image_terms", meta.params.image_terms}, {"dominance_factor", meta.params.dominance_factor}};
    j["grid"] = {{"a", meta.grid.a}, {"d", meta.grid.d}, {"n", meta.grid.n}};
    j["scheme"] = to_string(meta.stepper.scheme);
    j["config"] = config_to_json(meta);
    json run = nullptr;
    if (traj) {
        run = {{"final_time", traj->final_time()},
               {"snapshots", traj->snapshots.size()},
               {"steps", traj->dt_history.size()},
               {"diverged", traj->diverged},
               {"diagnostic", traj->diagnostic}};
    }
    j["run"] = run;
    return j;
}

void write_report_json(const EstimateReport& report, const RunConfig& meta, const std::filesystem::path& path,
                       const Trajectory* traj) {
    auto out = open_for_write(path);
    out << report_to_json(report, meta, traj).dump(2) << '\n';
    finish_write(out, path);
}

}  // namespace gbevolve
