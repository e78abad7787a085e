#include "pulsekit/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pulsekit {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (allowed.find(key) == allowed.end()) fail(where, "unknown key '" + key + "'");
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number())
        fail(where, "missing numeric '" + key + "'");
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number_integer())
        fail(where, "missing integer '" + key + "'");
    return obj[key].get<int>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_string())
        fail(where, "missing string '" + key + "'");
    return obj[key].get<std::string>();
}

Vec3 get_vec3(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_array() || obj[key].size() != 3)
        fail(where, "'" + key + "' must be an array of 3 numbers");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        if (!obj[key][static_cast<std::size_t>(i)].is_number())
            fail(where, "'" + key + "' must be an array of 3 numbers");
        v[static_cast<std::size_t>(i)] = obj[key][static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

Quaternion get_quat(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_array() || obj[key].size() != 4)
        fail(where, "'" + key + "' must be an array of 4 numbers [A,B,C,D]");
    Quaternion q;
    q.a = obj[key][0].get<double>();
    q.b = obj[key][1].get<double>();
    q.c = obj[key][2].get<double>();
    q.d = obj[key][3].get<double>();
    return q;
}

GridSpec parse_grid(const json& g, const std::string& where) {
    require_keys(g, where, {"n_offsets", "bandwidth_hz", "n_b1", "b1_tolerance"});
    GridSpec grid;
    grid.n_off = get_int(g, where, "n_offsets");
    grid.bandwidth_hz = get_number(g, where, "bandwidth_hz");
    grid.n_rf = g.contains("n_b1") ? get_int(g, where, "n_b1") : 1;
    grid.b1_tolerance = get_number_or(g, "b1_tolerance", 0.0);
    try {
        grid.validate();
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
    return grid;
}

ConstraintConfig parse_constraint(const json& c, const std::string& where) {
    require_keys(c, where,
                 {"type", "max_amplitude_hz", "max_rms_amplitude_hz", "max_energy_hz"});
    ConstraintConfig cc;
    cc.type = get_string(c, where, "type");
    const char* value_key = nullptr;
    if (cc.type == "amplitude") value_key = "max_amplitude_hz";
    else if (cc.type == "power") value_key = "max_rms_amplitude_hz";
    else if (cc.type == "energy") value_key = "max_energy_hz";
    else fail(where, "constraint type must be amplitude, power or energy");
    cc.value_hz = get_number(c, where, value_key);
    if (!(cc.value_hz > 0)) fail(where, std::string(value_key) + " must be > 0");
    return cc;
}

Target parse_target(const json& p, const std::string& where) {
    const std::string type = get_string(p, where, "type");
    try {
        if (type == "pp")
            return Target::point_to_point(get_vec3(p, where, "rho0"),
                                          get_vec3(p, where, "lambda_f"));
        if (type == "ur") return Target::universal_rotation(get_quat(p, where, "q_f"));
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    fail(where, "type must be 'pp' or 'ur'");
}

OptimizeJob parse_optimize(const json& doc, const std::string& origin) {
    const std::string pw = origin + ":/problem";
    const json& p = doc["problem"];
    if (!p.is_object()) fail(pw, "must be an object");
    require_keys(p, pw,
                 {"type", "rho0", "lambda_f", "q_f", "n_digits", "dt_us", "basis",
                  "max_amplitude_hz", "constraint", "grid"});

    OptimizeJob job;
    job.problem.target = parse_target(p, pw);

    const int n_digits = get_int(p, pw, "n_digits");
    if (n_digits < 1) fail(pw, "n_digits must be >= 1");
    const double dt = get_number(p, pw, "dt_us") * 1e-6;
    if (!(dt > 0)) fail(pw, "dt_us must be > 0");

    const double max_amp_hz = get_number_or(p, "max_amplitude_hz", 0.0);
    const double max_amp = kTwoPi * max_amp_hz * dt;

    ControlBasis basis;
    try {
        basis = ControlBasis::parse(get_string(p, pw, "basis"), max_amp);
    } catch (const std::invalid_argument& e) {
        fail(pw, e.what());
    }
    if (basis.kind == BasisKind::PhaseOnly && !(max_amp > 0))
        fail(pw, "phase_only basis requires max_amplitude_hz > 0");

    if (p.contains("constraint")) {
        if (!p["constraint"].is_object()) fail(pw + "/constraint", "must be an object");
        job.problem.constraint =
            parse_constraint(p["constraint"], pw + "/constraint").to_spec(dt);
    }
    if (basis.is_reduced() && !job.problem.constraint.has_value())
        fail(pw, "basis '" + basis.name() + "' requires a constraint");

    if (!p.contains("grid") || !p["grid"].is_object()) fail(pw, "missing object 'grid'");
    job.problem.grid = parse_grid(p["grid"], pw + "/grid");

    PulseShape tmpl;
    tmpl.basis = basis;
    Digit d;
    d.dt = dt;
    d.controls.assign(static_cast<std::size_t>(basis.arity()), 0.0);
    tmpl.digits.assign(static_cast<std::size_t>(n_digits), d);
    job.problem.shape_template = std::move(tmpl);
    job.problem.init_amplitude = max_amp;

    if (doc.contains("optimizer")) {
        const std::string ow = origin + ":/optimizer";
        const json& o = doc["optimizer"];
        if (!o.is_object()) fail(ow, "must be an object");
        require_keys(o, ow,
                     {"max_iterations", "grad_tolerance", "lbfgs_memory", "seed", "starts",
                      "init", "init_file", "wolfe_c1", "wolfe_c2"});
        auto& opt = job.problem.options;
        if (o.contains("max_iterations")) opt.max_iterations = get_int(o, ow, "max_iterations");
        opt.grad_tolerance = get_number_or(o, "grad_tolerance", opt.grad_tolerance);
        if (o.contains("lbfgs_memory")) opt.lbfgs_memory = get_int(o, ow, "lbfgs_memory");
        if (o.contains("seed")) {
            if (!o["seed"].is_number_integer()) fail(ow, "'seed' must be an integer");
            opt.seed = o["seed"].get<std::uint64_t>();
        }
        if (o.contains("starts")) {
            job.starts = get_int(o, ow, "starts");
            if (job.starts < 1) fail(ow, "starts must be >= 1");
        }
        if (o.contains("init")) {
            const std::string init = get_string(o, ow, "init");
            if (init == "random_phase") opt.init_strategy = InitStrategy::RandomPhase;
            else if (init == "random_small") opt.init_strategy = InitStrategy::RandomSmall;
            else if (init == "from_file") opt.init_strategy = InitStrategy::FromFile;
            else fail(ow, "init must be random_phase, random_small or from_file");
        }
        if (o.contains("init_file")) job.init_file = get_string(o, ow, "init_file");
        if (opt.init_strategy == InitStrategy::FromFile && job.init_file.empty())
            fail(ow, "init=from_file requires init_file");
        opt.wolfe_c1 = get_number_or(o, "wolfe_c1", opt.wolfe_c1);
        opt.wolfe_c2 = get_number_or(o, "wolfe_c2", opt.wolfe_c2);
    }

    try {
        job.problem.validate();
    } catch (const std::exception& e) {
        fail(origin + ":/problem", e.what());
    }
    return job;
}

SimulateJob parse_simulate(const json& doc, const std::string& origin) {
    const std::string sw = origin + ":/simulate";
    const json& s = doc["simulate"];
    if (!s.is_object()) fail(sw, "must be an object");
    require_keys(s, sw,
                 {"shape_file", "format", "jcamp_max_amplitude_hz", "jcamp_dt_us", "type",
                  "rho0", "q_f", "grid", "constraint"});
    SimulateJob job;
    job.shape_file = get_string(s, sw, "shape_file");
    if (s.contains("format")) {
        job.shape_format = get_string(s, sw, "format");
        if (job.shape_format != "native" && job.shape_format != "jcamp")
            fail(sw, "format must be 'native' or 'jcamp'");
    }
    if (job.shape_format == "jcamp") {
        job.jcamp_max_amplitude_hz = get_number(s, sw, "jcamp_max_amplitude_hz");
        job.jcamp_dt_us = get_number(s, sw, "jcamp_dt_us");
        if (!(job.jcamp_max_amplitude_hz > 0) || !(job.jcamp_dt_us > 0))
            fail(sw, "jcamp import needs positive jcamp_max_amplitude_hz and jcamp_dt_us");
    }
    const Target target = parse_target(s, sw);
    job.kind = target.kind;
    job.rho0 = target.rho0;
    job.q_f = target.q_f;
    if (!s.contains("grid") || !s["grid"].is_object()) fail(sw, "missing object 'grid'");
    job.grid = parse_grid(s["grid"], sw + "/grid");
    if (s.contains("constraint")) {
        if (!s["constraint"].is_object()) fail(sw + "/constraint", "must be an object");
        // Conversion to angle units happens once the shape file (and its
        // digit duration) has been read.
        job.constraint = parse_constraint(s["constraint"], sw + "/constraint");
    }
    return job;
}

RunConfig parse_document(const json& doc, const std::string& origin) {
    if (!doc.is_object()) fail(origin, "top level must be an object");
    require_keys(doc, origin, {"problem", "optimizer", "simulate"});
    RunConfig cfg;
    if (doc.contains("problem")) cfg.optimize = parse_optimize(doc, origin);
    else if (doc.contains("optimizer"))
        fail(origin, "'optimizer' section requires a 'problem' section");
    if (doc.contains("simulate")) cfg.simulate = parse_simulate(doc, origin);
    if (!cfg.optimize.has_value() && !cfg.simulate.has_value())
        fail(origin, "config defines neither 'problem' nor 'simulate'");
    return cfg;
}

RunConfig parse_stream(std::istream& is, const std::string& origin, const std::string* text) {
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        int line = 1;
        if (text != nullptr) {
            const std::size_t upto = std::min(e.byte, text->size());
            line += static_cast<int>(std::count(text->begin(),
                                                text->begin() + static_cast<std::ptrdiff_t>(upto),
                                                '\n'));
        }
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + e.what());
    }
    return parse_document(doc, origin);
}

}  // namespace

ConstraintSpec ConstraintConfig::to_spec(double dt_seconds) const {
    if (type == "amplitude") return ConstraintSpec::amplitude(kTwoPi * value_hz * dt_seconds);
    if (type == "power") {
        const double cap = kTwoPi * value_hz * dt_seconds;
        return ConstraintSpec::power(cap * cap);
    }
    if (type == "energy")
        return ConstraintSpec::energy(kTwoPi * kTwoPi * dt_seconds * value_hz);
    throw ConfigError("constraint type must be amplitude, power or energy");
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    std::istringstream ss(text);
    return parse_stream(ss, path, &text);
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::istringstream ss(text);
    return parse_stream(ss, origin, &text);
}

}  // namespace pulsekit
