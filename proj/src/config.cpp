#include "suptrap/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace suptrap::harness {

using nlohmann::ordered_json;

std::string to_string(OutputFormat format) {
    return format == OutputFormat::Csv ? "csv" : "json";
}

wavefield::GridWavefunction StateSpec::build(const wavefield::Grid1D& grid,
                                             double mass) const {
    switch (type) {
        case Type::BoxEigenstate:
            return wavefield::box_eigenstate(grid, n, mass);
        case Type::BoxSuperposition:
            return wavefield::box_superposition(grid, modes, weights, mass);
        case Type::Gaussian:
            return wavefield::gaussian_packet(grid, x0, sigma, k0, mass);
        case Type::Hydrogen2s:
            return wavefield::hydrogen_2s_state(grid);
    }
    throw std::logic_error("unreachable state type");
}

namespace {

// Accumulating, unknown-key-rejecting view over one JSON object.
class Reader {
public:
    Reader(const ordered_json& node, std::string path,
           std::vector<std::string>& errors)
        : node_(&node), path_(std::move(path)), errors_(&errors) {
        if (!node_->is_object()) {
            fail("", "must be an object");
            valid_ = false;
        }
    }

    bool valid() const { return valid_; }

    bool has(const std::string& key) const {
        return valid_ && node_->contains(key);
    }

    double number(const std::string& key, std::optional<double> fallback,
                  double lo = -std::numeric_limits<double>::infinity(),
                  double hi = std::numeric_limits<double>::infinity()) {
        const ordered_json* v = fetch(key, fallback.has_value());
        if (!v) return fallback.value_or(0.0);
        if (!v->is_number()) {
            fail(key, "must be a number");
            return fallback.value_or(lo);
        }
        const double x = v->get<double>();
        if (x < lo || x > hi) {
            fail(key, "must be in [" + format_bound(lo) + ", " + format_bound(hi) +
                          "], got " + format_bound(x));
            return fallback.value_or(lo);
        }
        return x;
    }

    long integer(const std::string& key, std::optional<long> fallback, long lo,
                 long hi = std::numeric_limits<long>::max()) {
        const ordered_json* v = fetch(key, fallback.has_value());
        if (!v) return fallback.value_or(lo);
        if (!v->is_number_integer()) {
            fail(key, "must be an integer");
            return fallback.value_or(lo);
        }
        const long x = v->get<long>();
        if (x < lo || x > hi) {
            fail(key, "must be in [" + std::to_string(lo) + ", " +
                          (hi == std::numeric_limits<long>::max()
                               ? std::string("inf")
                               : std::to_string(hi)) +
                          "], got " + std::to_string(x));
            return fallback.value_or(lo);
        }
        return x;
    }

    std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
        const ordered_json* v = fetch(key, true);
        if (!v) return fallback;
        if (!v->is_number_integer() && !v->is_number_unsigned()) {
            fail(key, "must be a nonnegative integer");
            return fallback;
        }
        if (v->is_number_integer() && v->get<long long>() < 0 &&
            !v->is_number_unsigned()) {
            fail(key, "must be a nonnegative integer");
            return fallback;
        }
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const ordered_json* v = fetch(key, true);
        if (!v) return fallback;
        if (!v->is_boolean()) {
            fail(key, "must be a boolean");
            return fallback;
        }
        return v->get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback,
                       const std::vector<std::string>& allowed = {}) {
        const ordered_json* v = fetch(key, fallback.has_value());
        if (!v) return fallback.value_or("");
        if (!v->is_string()) {
            fail(key, "must be a string");
            return fallback.value_or("");
        }
        const std::string s = v->get<std::string>();
        if (!allowed.empty() &&
            std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(key, "must be one of {" + list + "}, got \"" + s + "\"");
            return fallback.value_or(allowed.front());
        }
        return s;
    }

    const ordered_json* object(const std::string& key, bool required) {
        const ordered_json* v = fetch(key, !required);
        if (!v) return nullptr;
        if (!v->is_object()) {
            fail(key, "must be an object");
            return nullptr;
        }
        return v;
    }

    const ordered_json* array(const std::string& key, bool required) {
        const ordered_json* v = fetch(key, !required);
        if (!v) return nullptr;
        if (!v->is_array()) {
            fail(key, "must be an array");
            return nullptr;
        }
        return v;
    }

    void finish() {
        if (!valid_) return;
        for (const auto& item : node_->items())
            if (!consumed_.count(item.key()))
                fail(item.key(), "unknown key");
    }

    void fail(const std::string& key, const std::string& msg) {
        const std::string where =
            path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
        errors_->push_back(where + ": " + msg);
    }

    std::string child_path(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    static std::string format_bound(double b) {
        if (std::isinf(b)) return b > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", b);
        return buf;
    }

    const ordered_json* fetch(const std::string& key, bool optional_key) {
        if (!valid_) return nullptr;
        consumed_.insert(key);
        if (!node_->contains(key)) {
            if (!optional_key) fail(key, "missing required field");
            return nullptr;
        }
        return &(*node_)[key];
    }

    const ordered_json* node_;
    std::string path_;
    std::vector<std::string>* errors_;
    std::set<std::string> consumed_;
    bool valid_ = true;
};

collapse::CollapseModel parse_model(const ordered_json* node, const std::string& path,
                                    std::vector<std::string>& errors) {
    collapse::CollapseModel model;
    if (!node) return model;  // default: none
    Reader r(*node, path, errors);
    const std::string kind =
        r.string("kind", std::string("none"),
                 {"none", "dephasing", "projective_events", "csl_like"});
    if (kind == "dephasing") {
        model.kind = collapse::ModelKind::Dephasing;
        model.gamma = r.number("gamma", std::nullopt, 0.0);
    } else if (kind == "projective_events") {
        model.kind = collapse::ModelKind::ProjectiveEvents;
        model.lambda = r.number("lambda", std::nullopt, 0.0);
    } else if (kind == "csl_like") {
        model.kind = collapse::ModelKind::CslLike;
        model.csl_lambda0 = r.number("lambda0", std::nullopt, 0.0);
        model.csl_mass_factor = r.number("mass_factor", 1.0, 0.0);
        model.csl_sep_factor = r.number("sep_factor", 1.0, 0.0, 1.0);
    }
    r.finish();
    return model;
}

wavefield::Grid1D parse_grid(const ordered_json* node, const std::string& path,
                             std::vector<std::string>& errors) {
    wavefield::Grid1D grid{0.0, 1.0 / 127.0, 128};
    if (!node) {
        errors.push_back(path + ": missing required field");
        return grid;
    }
    Reader r(*node, path, errors);
    grid.x_min = r.number("x_min", 0.0);
    grid.n_points = static_cast<int>(r.integer("n_points", std::nullopt, 8, 1 << 24));
    const bool has_dx = r.has("dx");
    const bool has_length = r.has("length");
    if (has_dx == has_length) {
        r.fail("", "exactly one of dx or length is required");
        (void)r.number("dx", 0.0);
        (void)r.number("length", 0.0);
    } else if (has_dx) {
        grid.dx = r.number("dx", std::nullopt, 1e-12);
    } else {
        const double len = r.number("length", std::nullopt, 1e-12);
        grid.dx = len / (grid.n_points - 1);
    }
    r.finish();
    return grid;
}

StateSpec parse_state(const ordered_json* node, const std::string& path,
                      std::vector<std::string>& errors) {
    StateSpec spec;
    if (!node) {
        errors.push_back(path + ": missing required field");
        return spec;
    }
    Reader r(*node, path, errors);
    const std::string type = r.string(
        "type", std::nullopt,
        {"box_eigenstate", "box_superposition", "gaussian", "hydrogen_2s"});
    if (type == "box_eigenstate") {
        spec.type = StateSpec::Type::BoxEigenstate;
        spec.n = static_cast<int>(r.integer("n", 1L, 1, 1 << 20));
    } else if (type == "box_superposition") {
        spec.type = StateSpec::Type::BoxSuperposition;
        if (const ordered_json* modes = r.array("modes", true)) {
            for (const auto& m : *modes) {
                if (!m.is_number_integer() || m.get<long>() < 1)
                    r.fail("modes", "entries must be integers >= 1");
                else
                    spec.modes.push_back(m.get<int>());
            }
        }
        if (const ordered_json* weights = r.array("weights", false)) {
            for (const auto& w : *weights) {
                if (!w.is_number())
                    r.fail("weights", "entries must be numbers");
                else
                    spec.weights.push_back(w.get<double>());
            }
        }
        if (spec.weights.empty()) spec.weights.assign(spec.modes.size(), 1.0);
        if (spec.weights.size() != spec.modes.size())
            r.fail("weights", "must match the number of modes");
    } else if (type == "gaussian") {
        spec.type = StateSpec::Type::Gaussian;
        spec.x0 = r.number("x0", 0.0);
        spec.sigma = r.number("sigma", std::nullopt, 1e-12);
        spec.k0 = r.number("k0", 0.0);
    } else {
        spec.type = StateSpec::Type::Hydrogen2s;
    }
    r.finish();
    return spec;
}

BubbleConfig parse_bubble(const ordered_json& node, const std::string& path,
                          std::vector<std::string>& errors) {
    BubbleConfig cfg;
    Reader r(node, path, errors);
    cfg.grid = parse_grid(r.object("grid", true), r.child_path("grid"), errors);
    cfg.mass = r.number("mass", 1.0, 1e-12);
    cfg.state = parse_state(r.object("state", true), r.child_path("state"), errors);
    if (const ordered_json* b = r.object("boundary", true)) {
        Reader br(*b, r.child_path("boundary"), errors);
        cfg.boundary.a = br.number("a", std::nullopt);
        cfg.boundary.b = br.number("b", std::nullopt);
        if (cfg.boundary.a >= cfg.boundary.b)
            br.fail("", "requires a < b");
        br.finish();
    }
    cfg.dt = r.number("dt", std::nullopt, 1e-15);
    cfg.n_steps = static_cast<int>(r.integer("n_steps", std::nullopt, 1, 100000000));
    r.finish();

    if (errors.empty()) {
        if (cfg.boundary.a < cfg.grid.x_min || cfg.boundary.b > cfg.grid.x_max())
            errors.push_back(path + ".boundary: outside the grid domain");
    }
    return cfg;
}

PathsumConfig parse_pathsum(const ordered_json& node, const std::string& path,
                            std::vector<std::string>& errors) {
    PathsumConfig cfg;
    Reader r(node, path, errors);
    cfg.instances = static_cast<int>(r.integer("instances", 200L, 1, 100000));
    cfg.max_sites = static_cast<int>(r.integer("max_sites", 4L, 2, 6));
    cfg.max_steps = static_cast<int>(r.integer("max_steps", 8L, 2, 12));
    r.finish();
    return cfg;
}

OpticalRunConfig parse_optical(const ordered_json& node, const std::string& path,
                               std::vector<std::string>& errors) {
    OpticalRunConfig cfg;
    Reader r(node, path, errors);
    cfg.trap.model = parse_model(r.object("model", false), r.child_path("model"), errors);
    cfg.trap.pass_duration = r.number("pass_duration", 1.0, 1e-12);
    cfg.trap.max_passes =
        static_cast<int>(r.integer("max_passes", 1000L, 1, 100000000));
    cfg.trap.arm_phase = r.number("arm_phase", 0.0);
    cfg.trap.absorb_collapsed_recirculation =
        r.boolean("absorb_collapsed_recirculation", false);
    cfg.n_photons = r.integer("n_photons", 1000L, 1);
    r.finish();
    return cfg;
}

AtomRunConfig parse_atom(const ordered_json& node, const std::string& path,
                         std::vector<std::string>& errors) {
    AtomRunConfig cfg;
    Reader r(node, path, errors);
    cfg.trap.model = parse_model(r.object("model", false), r.child_path("model"), errors);
    cfg.trap.cycle_duration = r.number("cycle_duration", 1.0, 1e-12);
    cfg.trap.n_cycles = static_cast<int>(r.integer("n_cycles", 10L, 1, 100000000));
    cfg.trap.push_efficiency = r.number("push_efficiency", 1.0, 0.0, 1.0);
    cfg.trap.pulse_fidelity = r.number("pulse_fidelity", 1.0, 0.0, 1.0);
    cfg.trap.excited_loss = r.number("excited_loss", 0.0, 0.0, 1.0);
    cfg.trap.arm_phase = r.number("arm_phase", 0.0);
    cfg.n_atoms = r.integer("n_atoms", 1000L, 1);
    r.finish();
    return cfg;
}

EstimateConfig parse_estimate(const ordered_json& node, const std::string& path,
                              std::vector<std::string>& errors) {
    EstimateConfig cfg;
    Reader r(node, path, errors);
    cfg.input = r.string("input", std::nullopt);
    cfg.kind = r.string("kind", std::string("atom"), {"atom", "optical"});
    cfg.eta = r.number("eta", 1.0, 1e-12, 1.0);
    cfg.confidence = r.number("confidence", 0.95, 1e-6, 1.0 - 1e-6);
    cfg.profile_likelihood =
        r.string("interval", std::string("wald"), {"wald", "profile"}) == "profile";
    cfg.cycle_duration = r.number("cycle_duration", 1.0, 1e-12);
    r.finish();
    return cfg;
}

SweepConfig parse_sweep(const ordered_json& node, const std::string& path,
                        std::vector<std::string>& errors) {
    SweepConfig cfg;
    Reader r(node, path, errors);
    cfg.target = r.string("target", std::nullopt, {"atom", "optical"});
    cfg.parameter = r.string("parameter", std::nullopt);
    if (const ordered_json* values = r.array("values", true)) {
        for (const auto& v : *values) {
            if (!v.is_number())
                r.fail("values", "entries must be numbers");
            else
                cfg.values.push_back(v.get<double>());
        }
        if (cfg.values.empty()) r.fail("values", "must not be empty");
    }
    if (const ordered_json* base = r.object("base", true)) {
        cfg.base = *base;
        // the unpatched base must itself be a valid target block
        if (cfg.target == "atom")
            (void)parse_atom(*base, r.child_path("base"), errors);
        else if (cfg.target == "optical")
            (void)parse_optical(*base, r.child_path("base"), errors);
    }
    r.finish();
    return cfg;
}

}  // namespace

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const std::exception& e) {
        result.errors.push_back(std::string("config: invalid JSON: ") + e.what());
        return result;
    }

    ExperimentConfig cfg;
    auto& errors = result.errors;
    Reader r(root, "", errors);
    cfg.seed = r.unsigned64("seed", 1);
    cfg.format = r.string("format", std::string("csv"), {"csv", "json"}) == "json"
                     ? OutputFormat::Json
                     : OutputFormat::Csv;

    if (const ordered_json* node = r.object("bubble", false))
        cfg.bubble = parse_bubble(*node, "bubble", errors);
    if (const ordered_json* node = r.object("pathsum", false))
        cfg.pathsum = parse_pathsum(*node, "pathsum", errors);
    if (const ordered_json* node = r.object("optical", false))
        cfg.optical = parse_optical(*node, "optical", errors);
    if (const ordered_json* node = r.object("atom", false))
        cfg.atom = parse_atom(*node, "atom", errors);
    if (const ordered_json* node = r.object("estimate", false))
        cfg.estimate = parse_estimate(*node, "estimate", errors);
    if (const ordered_json* node = r.object("sweep", false))
        cfg.sweep = parse_sweep(*node, "sweep", errors);
    r.finish();

    if (!errors.empty()) return result;
    result.config = std::move(cfg);
    return result;
}

namespace {

ordered_json model_echo(const collapse::CollapseModel& m) {
    ordered_json j;
    j["kind"] = collapse::to_string(m.kind);
    switch (m.kind) {
        case collapse::ModelKind::Dephasing:
            j["gamma"] = m.gamma;
            break;
        case collapse::ModelKind::ProjectiveEvents:
            j["lambda"] = m.lambda;
            break;
        case collapse::ModelKind::CslLike:
            j["lambda0"] = m.csl_lambda0;
            j["mass_factor"] = m.csl_mass_factor;
            j["sep_factor"] = m.csl_sep_factor;
            break;
        case collapse::ModelKind::None:
            break;
    }
    return j;
}

ordered_json state_echo(const StateSpec& s) {
    ordered_json j;
    switch (s.type) {
        case StateSpec::Type::BoxEigenstate:
            j["type"] = "box_eigenstate";
            j["n"] = s.n;
            break;
        case StateSpec::Type::BoxSuperposition:
            j["type"] = "box_superposition";
            j["modes"] = s.modes;
            j["weights"] = s.weights;
            break;
        case StateSpec::Type::Gaussian:
            j["type"] = "gaussian";
            j["x0"] = s.x0;
            j["sigma"] = s.sigma;
            j["k0"] = s.k0;
            break;
        case StateSpec::Type::Hydrogen2s:
            j["type"] = "hydrogen_2s";
            break;
    }
    return j;
}

}  // namespace

nlohmann::ordered_json config_echo(const ExperimentConfig& config) {
    ordered_json j;
    j["seed"] = config.seed;
    j["format"] = to_string(config.format);
    if (config.bubble) {
        const auto& b = *config.bubble;
        ordered_json jb;
        jb["grid"] = {{"x_min", b.grid.x_min},
                      {"dx", b.grid.dx},
                      {"n_points", b.grid.n_points}};
        jb["mass"] = b.mass;
        jb["state"] = state_echo(b.state);
        jb["boundary"] = {{"a", b.boundary.a}, {"b", b.boundary.b}};
        jb["dt"] = b.dt;
        jb["n_steps"] = b.n_steps;
        j["bubble"] = jb;
    }
    if (config.pathsum) {
        const auto& p = *config.pathsum;
        j["pathsum"] = {{"instances", p.instances},
                        {"max_sites", p.max_sites},
                        {"max_steps", p.max_steps}};
    }
    if (config.optical) {
        const auto& o = *config.optical;
        ordered_json jo;
        jo["model"] = model_echo(o.trap.model);
        jo["pass_duration"] = o.trap.pass_duration;
        jo["max_passes"] = o.trap.max_passes;
        jo["arm_phase"] = o.trap.arm_phase;
        jo["absorb_collapsed_recirculation"] = o.trap.absorb_collapsed_recirculation;
        jo["n_photons"] = o.n_photons;
        j["optical"] = jo;
    }
    if (config.atom) {
        const auto& a = *config.atom;
        ordered_json ja;
        ja["model"] = model_echo(a.trap.model);
        ja["cycle_duration"] = a.trap.cycle_duration;
        ja["n_cycles"] = a.trap.n_cycles;
        ja["push_efficiency"] = a.trap.push_efficiency;
        ja["pulse_fidelity"] = a.trap.pulse_fidelity;
        ja["excited_loss"] = a.trap.excited_loss;
        ja["arm_phase"] = a.trap.arm_phase;
        ja["n_atoms"] = a.n_atoms;
        j["atom"] = ja;
    }
    if (config.estimate) {
        const auto& e = *config.estimate;
        j["estimate"] = {{"input", e.input},
                         {"kind", e.kind},
                         {"eta", e.eta},
                         {"confidence", e.confidence},
                         {"interval", e.profile_likelihood ? "profile" : "wald"},
                         {"cycle_duration", e.cycle_duration}};
    }
    if (config.sweep) {
        const auto& s = *config.sweep;
        ordered_json js;
        js["target"] = s.target;
        js["parameter"] = s.parameter;
        js["values"] = s.values;
        js["base"] = s.base;
        j["sweep"] = js;
    }
    return j;
}

}  // namespace suptrap::harness
