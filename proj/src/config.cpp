// config.cpp: Strict JSON configuration

#include "heatrect/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

extern char** environ;

namespace heatrect {

namespace {

void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <typename T>
T get(const Json& obj, const std::string& where, const char* key, const T& fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
T require(const Json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
    return get<T>(obj, where, key, T{});
}

double number(const Json& obj, const std::string& where, const char* key, double fallback) {
    if (obj.contains(key) && !obj.at(key).is_null() && !obj.at(key).is_number())
        throw ConfigError(where + "." + key + ": expected a number");
    return get<double>(obj, where, key, fallback);
}

std::optional<double> optional_number(const Json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return number(obj, where, key, 0.0);
}

int integer(const Json& obj, const std::string& where, const char* key, int fallback) {
    if (obj.contains(key) && !obj.at(key).is_null() && !obj.at(key).is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    return get<int>(obj, where, key, fallback);
}

std::vector<double> numbers(const Json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) return {};
    const Json& a = obj.at(key);
    if (!a.is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    std::vector<double> v;
    for (const auto& x : a) {
        if (!x.is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

ModelConfig parse_model(const Json& j) {
    const std::string w = "model";
    ModelConfig m;
    if (!j.is_object()) throw ConfigError("model: expected an object");
    m.type = get<std::string>(j, w, "type", m.type);
    if (m.type == "two_oscillator") {
        check_keys(j, w, {"type", "omega1", "omega2", "c0", "v1", "omega_d"});
        m.omega1 = number(j, w, "omega1", m.omega1);
        m.omega2 = number(j, w, "omega2", m.omega2);
        m.c0 = number(j, w, "c0", m.c0);
        m.v1 = number(j, w, "v1", m.v1);
    } else if (m.type == "generic") {
        check_keys(j, w, {"type", "masses", "v0", "harmonics", "omega_d"});
        m.masses = numbers(j, w, "masses");
        m.v0 = numbers(j, w, "v0");
        if (m.masses.empty()) throw ConfigError("model.masses: required for generic models");
        if (j.contains("harmonics")) {
            if (!j.at("harmonics").is_array()) throw ConfigError("model.harmonics: expected an array");
            for (const auto& h : j.at("harmonics")) {
                const std::string hw = "model.harmonics[]";
                check_keys(h, hw, {"k", "re", "im"});
                HarmonicConfig hc;
                hc.k = integer(h, hw, "k", 1);
                hc.re = numbers(h, hw, "re");
                hc.im = numbers(h, hw, "im");
                if (hc.k <= 0) throw ConfigError("model.harmonics: k must be positive (k < 0 is implied)");
                m.harmonics.push_back(std::move(hc));
            }
        }
    } else {
        throw ConfigError("model.type: expected 'two_oscillator' or 'generic', got '" + m.type + "'");
    }
    m.omega_d = optional_number(j, w, "omega_d");
    return m;
}

std::vector<BathSpec> parse_baths(const Json& j) {
    if (!j.is_array()) throw ConfigError("baths: expected an array");
    std::vector<BathSpec> out;
    for (const auto& b : j) {
        const std::string w = "baths[" + std::to_string(out.size()) + "]";
        check_keys(b, w, {"node", "temperature", "gamma", "cutoff"});
        BathSpec s;
        s.node = integer(b, w, "node", 0);
        if (!b.contains("node")) throw ConfigError(w + ": missing required key 'node'");
        if (!b.contains("temperature")) throw ConfigError(w + ": missing required key 'temperature'");
        s.temperature = number(b, w, "temperature", s.temperature);
        s.gamma = number(b, w, "gamma", s.gamma);
        s.cutoff = number(b, w, "cutoff", s.cutoff);
        out.push_back(s);
    }
    return out;
}

SolverConfig parse_solver(const Json& j) {
    const std::string w = "solver";
    check_keys(j, w,
               {"floquet_order", "omega_max", "quad_rel_tol", "max_floquet_order", "order_tol", "instability_policy",
                "stability_steps", "condition_limit", "oracle"});
    SolverConfig s;
    if (j.contains("floquet_order") && !j.at("floquet_order").is_null())
        s.floquet_order = integer(j, w, "floquet_order", 0);
    s.omega_max = optional_number(j, w, "omega_max");
    s.quad_rel_tol = number(j, w, "quad_rel_tol", s.quad_rel_tol);
    s.max_floquet_order = integer(j, w, "max_floquet_order", s.max_floquet_order);
    s.order_tol = number(j, w, "order_tol", s.order_tol);
    s.instability_policy = get<std::string>(j, w, "instability_policy", s.instability_policy);
    if (s.instability_policy != "sentinel" && s.instability_policy != "error")
        throw ConfigError("solver.instability_policy: expected 'sentinel' or 'error'");
    s.stability_steps = integer(j, w, "stability_steps", s.stability_steps);
    s.condition_limit = number(j, w, "condition_limit", s.condition_limit);
    if (!(s.quad_rel_tol > 0.0)) throw ConfigError("solver.quad_rel_tol: must be positive");
    if (j.contains("oracle")) {
        const Json& o = j.at("oracle");
        const std::string ow = "solver.oracle";
        check_keys(o, ow,
                   {"modes_per_bath", "bath_omega_max", "dt", "transient", "window", "samples_per_period", "init",
                    "trajectory"});
        auto& c = s.oracle;
        c.modes_per_bath = integer(o, ow, "modes_per_bath", c.modes_per_bath);
        c.bath_omega_max = number(o, ow, "bath_omega_max", c.bath_omega_max);
        c.dt = number(o, ow, "dt", c.dt);
        c.transient = number(o, ow, "transient", c.transient);
        c.window = number(o, ow, "window", c.window);
        c.samples_per_period = integer(o, ow, "samples_per_period", c.samples_per_period);
        c.init = get<std::string>(o, ow, "init", c.init);
        c.trajectory = get<bool>(o, ow, "trajectory", c.trajectory);
        if (c.init != "thermal" && c.init != "ground")
            throw ConfigError("solver.oracle.init: expected 'thermal' or 'ground'");
    }
    return s;
}

SweepConfig parse_sweep(const Json& j) {
    const std::string w = "sweep";
    check_keys(j, w, {"axes", "derivative_step"});
    SweepConfig s;
    s.derivative_step = number(j, w, "derivative_step", 0.0);
    if (j.contains("axes")) {
        if (!j.at("axes").is_array()) throw ConfigError("sweep.axes: expected an array");
        for (const auto& a : j.at("axes")) {
            const std::string aw = "sweep.axes[]";
            check_keys(a, aw, {"path", "start", "stop", "count"});
            SweepAxis ax;
            ax.path = require<std::string>(a, aw, "path");
            ax.start = number(a, aw, "start", 0.0);
            ax.stop = number(a, aw, "stop", ax.start);
            ax.count = integer(a, aw, "count", 1);
            if (ax.count < 1) throw ConfigError("sweep.axes: count must be positive");
            s.axes.push_back(ax);
        }
    }
    if (s.axes.size() > 2) throw ConfigError("sweep.axes: at most two axes");
    return s;
}

OutputConfig parse_output(const Json& j) {
    const std::string w = "output";
    check_keys(j, w, {"directory", "formats", "precision"});
    OutputConfig o;
    o.directory = get<std::string>(j, w, "directory", o.directory);
    if (j.contains("formats")) {
        o.formats.clear();
        if (!j.at("formats").is_array()) throw ConfigError("output.formats: expected an array");
        for (const auto& f : j.at("formats")) {
            if (!f.is_string()) throw ConfigError("output.formats: expected strings");
            const std::string s = f.get<std::string>();
            if (s != "csv" && s != "json") throw ConfigError("output.formats: unknown format '" + s + "'");
            o.formats.push_back(s);
        }
    }
    o.precision = integer(j, w, "precision", o.precision);
    if (o.precision < 1 || o.precision > 17) throw ConfigError("output.precision: expected 1..17");
    return o;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_index(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

} // namespace

RunConfig parse_config(const Json& doc) {
    check_keys(doc, "config", {"model", "baths", "solver", "sweep", "output"});
    if (!doc.contains("model")) throw ConfigError("config: missing section 'model'");
    if (!doc.contains("baths")) throw ConfigError("config: missing section 'baths'");
    RunConfig c;
    c.model = parse_model(doc.at("model"));
    c.baths = parse_baths(doc.at("baths"));
    if (doc.contains("solver")) c.solver = parse_solver(doc.at("solver"));
    if (doc.contains("sweep")) c.sweep = parse_sweep(doc.at("sweep"));
    if (doc.contains("output")) c.output = parse_output(doc.at("output"));
    return c;
}

Json to_json(const RunConfig& c) {
    Json m;
    m["type"] = c.model.type;
    m["omega_d"] = optional_json(c.model.omega_d);
    if (c.model.type == "generic") {
        m["masses"] = c.model.masses;
        m["v0"] = c.model.v0;
        Json hs = Json::array();
        for (const auto& h : c.model.harmonics) hs.push_back({{"k", h.k}, {"re", h.re}, {"im", h.im}});
        m["harmonics"] = hs;
    } else {
        m["omega1"] = c.model.omega1;
        m["omega2"] = c.model.omega2;
        m["c0"] = c.model.c0;
        m["v1"] = c.model.v1;
    }
    Json baths = Json::array();
    for (const auto& b : c.baths)
        baths.push_back({{"node", b.node}, {"temperature", b.temperature}, {"gamma", b.gamma}, {"cutoff", b.cutoff}});
    const auto& s = c.solver;
    Json solver = {{"floquet_order", s.floquet_order ? Json(*s.floquet_order) : Json(nullptr)},
                   {"omega_max", optional_json(s.omega_max)},
                   {"quad_rel_tol", s.quad_rel_tol},
                   {"max_floquet_order", s.max_floquet_order},
                   {"order_tol", s.order_tol},
                   {"instability_policy", s.instability_policy},
                   {"stability_steps", s.stability_steps},
                   {"condition_limit", s.condition_limit},
                   {"oracle",
                    {{"modes_per_bath", s.oracle.modes_per_bath},
                     {"bath_omega_max", s.oracle.bath_omega_max},
                     {"dt", s.oracle.dt},
                     {"transient", s.oracle.transient},
                     {"window", s.oracle.window},
                     {"samples_per_period", s.oracle.samples_per_period},
                     {"init", s.oracle.init},
                     {"trajectory", s.oracle.trajectory}}}};
    Json axes = Json::array();
    for (const auto& a : c.sweep.axes)
        axes.push_back({{"path", a.path}, {"start", a.start}, {"stop", a.stop}, {"count", a.count}});
    Json sweep = {{"axes", axes}, {"derivative_step", c.sweep.derivative_step}};
    Json output = {{"directory", c.output.directory}, {"formats", c.output.formats}, {"precision", c.output.precision}};
    return {{"model", m}, {"baths", baths}, {"solver", solver}, {"sweep", sweep}, {"output", output}};
}

Json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

void set_path(Json& doc, const std::string& path, const Json& value) {
    Json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("empty config path");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        const bool last = i + 1 == parts.size();
        if (node->is_array()) {
            if (!is_index(p)) throw ConfigError("config path '" + path + "': '" + p + "' is not an array index");
            const std::size_t idx = std::stoul(p);
            if (idx >= node->size()) throw ConfigError("config path '" + path + "': index out of range");
            node = &(*node)[idx];
        } else {
            if (node->is_null()) *node = Json::object();
            if (!node->is_object()) throw ConfigError("config path '" + path + "': cannot descend into a value");
            if (!last && !node->contains(p)) (*node)[p] = Json::object();
            node = &(*node)[p];
        }
        if (last) *node = value;
    }
}

void apply_env_overrides(Json& doc, const std::vector<std::pair<std::string, std::string>>& env,
                         const std::string& prefix) {
    std::vector<std::pair<std::string, std::string>> sorted = env;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [key, raw] : sorted) {
        if (key.rfind(prefix, 0) != 0) continue;
        std::string rest = lower(key.substr(prefix.size()));
        std::string path;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (rest.compare(i, 2, "__") == 0) {
                path += '.';
                ++i;
            } else {
                path += rest[i];
            }
        }
        // Only variables addressing a config section are overrides; other HEATRECT_* names
        // (tool paths and the like) are left alone.
        const std::string section = path.substr(0, path.find('.'));
        if (section != "model" && section != "baths" && section != "solver" && section != "sweep" &&
            section != "output")
            continue;
        Json value;
        try {
            value = Json::parse(raw);
        } catch (const Json::parse_error&) {
            value = raw;
        }
        set_path(doc, path, value);
    }
}

std::vector<std::pair<std::string, std::string>> environment_variables() {
    std::vector<std::pair<std::string, std::string>> out;
    for (char** e = environ; e && *e; ++e) {
        const std::string s(*e);
        const auto eq = s.find('=');
        if (eq != std::string::npos) out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
}

Model build_model(const RunConfig& c) {
    if (c.baths.empty()) throw ValidationError("config: at least one bath is required");
    const auto& m = c.model;
    if (m.type == "two_oscillator") {
        TwoOscillatorParams p;
        p.omega1 = m.omega1;
        p.omega2 = m.omega2;
        p.c0 = m.c0;
        p.v1 = m.v1;
        p.omega_d = m.omega_d;
        const Model base = p.build();
        return Model(base.network(), c.baths);
    }
    const std::size_t n = m.masses.size();
    if (m.v0.size() != n * n)
        throw ValidationError("model.v0: expected " + std::to_string(n * n) + " entries (row-major)");
    const Vector masses = Eigen::Map<const Vector>(m.masses.data(), static_cast<Eigen::Index>(n));
    const Matrix v0 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        m.v0.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (!m.omega_d) {
        if (!m.harmonics.empty()) throw ValidationError("model.harmonics given without omega_d");
        return Model(NetworkSpec(masses, v0), c.baths);
    }
    std::map<int, CMatrix> hs;
    for (const auto& h : m.harmonics) {
        if (h.re.size() != n * n || (!h.im.empty() && h.im.size() != n * n))
            throw ValidationError("model.harmonics: expected " + std::to_string(n * n) + " entries (row-major)");
        CMatrix v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t col = 0; col < n; ++col)
                v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) =
                    Complex(h.re[r * n + col], h.im.empty() ? 0.0 : h.im[r * n + col]);
        if (hs.count(h.k)) throw ValidationError("model.harmonics: duplicate k = " + std::to_string(h.k));
        hs[h.k] = v;
        hs[-h.k] = v.conjugate();
    }
    return Model(NetworkSpec(masses, v0, std::move(hs), *m.omega_d), c.baths);
}

SolverOptions solver_options(const RunConfig& c) {
    SolverOptions o;
    o.rel_tol = c.solver.quad_rel_tol;
    o.omega_max = c.solver.omega_max;
    o.floquet_order = c.solver.floquet_order;
    o.max_floquet_order = c.solver.max_floquet_order;
    o.order_tol = c.solver.order_tol;
    o.floquet_condition_limit = c.solver.condition_limit;
    return o;
}

StabilityOptions stability_options(const RunConfig& c) {
    StabilityOptions o;
    o.steps_per_period = c.solver.stability_steps;
    o.condition_limit = c.solver.condition_limit;
    return o;
}

OracleSettings oracle_settings(const RunConfig& c) {
    const auto& o = c.solver.oracle;
    OracleSettings s;
    s.modes_per_bath = o.modes_per_bath;
    s.bath_omega_max = o.bath_omega_max;
    s.dt = o.dt;
    s.transient = o.transient;
    s.window = o.window;
    s.samples_per_period = o.samples_per_period;
    s.init = o.init == "ground" ? SystemInit::ground : SystemInit::thermal;
    return s;
}

std::uint64_t config_hash(const RunConfig& c) {
    Json j = to_json(c);
    j.erase("output");
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace heatrect
