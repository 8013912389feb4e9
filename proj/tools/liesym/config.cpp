#include "app.hpp"

#include <liesym/errors.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

namespace liesym::app {

namespace {

using nlohmann::json;

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
    require_object(j, path);
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(join(path, key) + ": unknown key");
        }
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path + ": expected a finite number");
    return v;
}

std::uint64_t get_count(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) throw ConfigError(path + ": expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path + ": expected a string");
    return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
    return j.get<bool>();
}

template <class Fn>
auto with_path(const std::string& path, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.rfind(path, 0) == 0) throw;
        throw ConfigError(path + ": " + what);
    }
}

void parse_domain(const json& j, Domain& d) {
    const std::string path = "domain";
    reject_unknown(j, path, {"x_min", "x_max", "t_min", "t_max"});
    if (j.contains("x_min")) d.x_min = get_number(j["x_min"], join(path, "x_min"));
    if (j.contains("x_max")) d.x_max = get_number(j["x_max"], join(path, "x_max"));
    if (j.contains("t_min")) d.t_min = get_number(j["t_min"], join(path, "t_min"));
    if (j.contains("t_max")) d.t_max = get_number(j["t_max"], join(path, "t_max"));
    with_path(path, [&] { d.validate(); });
}

void parse_profile(const json& j, IcProfile& p) {
    const std::string path = "initial_condition";
    reject_unknown(j, path, {"profile", "parameters"});
    if (!j.contains("profile")) throw ConfigError(join(path, "profile") + ": required");
    const auto kind = with_path(join(path, "profile"), [&] {
        return parse_profile_kind(get_string(j["profile"], join(path, "profile")));
    });
    p = IcProfile::defaults(kind);
    if (j.contains("parameters")) {
        const auto& arr = j["parameters"];
        const std::string ppath = join(path, "parameters");
        if (!arr.is_array()) throw ConfigError(ppath + ": expected an array of numbers");
        p.parameters.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            p.parameters.push_back(get_number(arr[i], ppath + "[" + std::to_string(i) + "]"));
        }
    }
    with_path(path, [&] { p.validate(); });
}

void parse_collocation(const json& j, RunConfig& cfg) {
    const std::string path = "collocation";
    reject_unknown(j, path, {"points", "allocation", "seed"});
    if (j.contains("points")) cfg.collocation_points = get_count(j["points"], join(path, "points"));
    if (j.contains("seed")) cfg.collocation_seed = get_count(j["seed"], join(path, "seed"));
    if (j.contains("allocation")) {
        const std::string apath = join(path, "allocation");
        require_object(j["allocation"], apath);
        for (const auto& [key, value] : j["allocation"].items()) {
            const auto id = with_path(join(apath, key), [&] { return parse_component_id(key); });
            cfg.allocation[id] = get_number(value, join(apath, key));
        }
    }
}

void parse_catalog(const json& j, RunConfig& cfg) {
    const std::string path = "catalog";
    if (!j.is_array()) throw ConfigError(path + ": expected an array of family entries");
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string epath = path + "[" + std::to_string(i) + "]";
        const auto& e = j[i];
        reject_unknown(e, epath, {"family", "bounds", "sampling"});
        if (!e.contains("family")) throw ConfigError(join(epath, "family") + ": required");
        FamilySpec spec;
        spec.id = get_string(e["family"], join(epath, "family"));
        if (e.contains("bounds")) {
            const std::string bpath = join(epath, "bounds");
            require_object(e["bounds"], bpath);
            for (const auto& [name, b] : e["bounds"].items()) {
                const std::string p = join(bpath, name);
                if (!b.is_array() || b.size() != 2) throw ConfigError(p + ": expected [lo, hi]");
                spec.bounds[name] = {get_number(b[0], p + "[0]"), get_number(b[1], p + "[1]")};
            }
        }
        if (e.contains("sampling")) {
            const std::string spath = join(epath, "sampling");
            require_object(e["sampling"], spath);
            for (const auto& [name, rule] : e["sampling"].items()) {
                const std::string p = join(spath, name);
                spec.sampling[name] =
                    with_path(p, [&] { return parse_sampling_rule(get_string(rule, p)); });
            }
        }
        cfg.catalog.push_back(std::move(spec));
    }
}

void parse_refine(const json& j, TrustRegionConfig& r) {
    const std::string path = "solver.refine";
    reject_unknown(j, path,
                   {"nfev_global", "fd_step", "initial_radius", "expand", "shrink", "gradient_tol",
                    "step_tol", "max_rejections"});
    if (j.contains("nfev_global")) {
        r.max_iterations = static_cast<int>(get_count(j["nfev_global"], join(path, "nfev_global")));
    }
    if (j.contains("fd_step")) r.fd_step = get_number(j["fd_step"], join(path, "fd_step"));
    if (j.contains("initial_radius")) {
        r.initial_radius = get_number(j["initial_radius"], join(path, "initial_radius"));
    }
    if (j.contains("expand")) r.expand = get_number(j["expand"], join(path, "expand"));
    if (j.contains("shrink")) r.shrink = get_number(j["shrink"], join(path, "shrink"));
    if (j.contains("gradient_tol")) {
        r.gradient_tol = get_number(j["gradient_tol"], join(path, "gradient_tol"));
    }
    if (j.contains("step_tol")) r.step_tol = get_number(j["step_tol"], join(path, "step_tol"));
    if (j.contains("max_rejections")) {
        r.max_rejections =
            static_cast<int>(get_count(j["max_rejections"], join(path, "max_rejections")));
    }
}

void parse_solver(const json& j, SolverConfig& s) {
    const std::string path = "solver";
    reject_unknown(j, path,
                   {"mse_tol", "max_terms", "candidates_per_family", "additions_per_refine",
                    "ridge_lambda", "seed", "component_weights", "refine"});
    if (j.contains("mse_tol")) s.mse_tol = get_number(j["mse_tol"], join(path, "mse_tol"));
    if (j.contains("max_terms")) s.max_terms = get_count(j["max_terms"], join(path, "max_terms"));
    if (j.contains("candidates_per_family")) {
        s.candidates_per_family =
            get_count(j["candidates_per_family"], join(path, "candidates_per_family"));
    }
    if (j.contains("additions_per_refine")) {
        s.additions_per_refine =
            get_count(j["additions_per_refine"], join(path, "additions_per_refine"));
    }
    if (j.contains("ridge_lambda")) {
        s.ridge_lambda = get_number(j["ridge_lambda"], join(path, "ridge_lambda"));
    }
    if (j.contains("seed")) s.seed = get_count(j["seed"], join(path, "seed"));
    if (j.contains("component_weights")) {
        const std::string wpath = join(path, "component_weights");
        require_object(j["component_weights"], wpath);
        for (const auto& [key, value] : j["component_weights"].items()) {
            const auto id = with_path(join(wpath, key), [&] { return parse_component_id(key); });
            s.component_weights[id] = get_number(value, join(wpath, key));
        }
    }
    if (j.contains("refine")) parse_refine(j["refine"], s.refine);
    with_path(path, [&] { s.validate(); });
}

void parse_reference(const json& j, RunConfig& cfg) {
    const std::string path = "reference";
    reject_unknown(j, path, {"modes", "grid"});
    if (j.contains("modes")) cfg.reference_modes = get_count(j["modes"], join(path, "modes"));
    if (cfg.reference_modes < 1) throw ConfigError(join(path, "modes") + ": must be >= 1");
    if (j.contains("grid")) {
        const std::string gpath = join(path, "grid");
        reject_unknown(j["grid"], gpath, {"nx", "nt"});
        if (j["grid"].contains("nx")) cfg.grid_nx = get_count(j["grid"]["nx"], join(gpath, "nx"));
        if (j["grid"].contains("nt")) cfg.grid_nt = get_count(j["grid"]["nt"], join(gpath, "nt"));
        if (cfg.grid_nx < 2 || cfg.grid_nt < 2) throw ConfigError(gpath + ": needs nx, nt >= 2");
    }
}

void parse_output(const json& j, RunConfig& cfg) {
    const std::string path = "output";
    reject_unknown(j, path, {"directory", "plot_script"});
    if (j.contains("directory")) {
        cfg.output_directory = get_string(j["directory"], join(path, "directory"));
    }
    if (j.contains("plot_script")) {
        cfg.plot_script = get_bool(j["plot_script"], join(path, "plot_script"));
    }
}

} // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    try {
        reject_unknown(doc, "",
                       {"name", "pde", "domain", "initial_condition", "collocation", "catalog",
                        "solver", "reference", "output"});
        RunConfig cfg;
        if (!doc.contains("pde")) throw ConfigError("pde: required");
        cfg.pde = with_path("pde", [&] { return parse_pde_kind(get_string(doc["pde"], "pde")); });
        cfg.domain = Domain::default_for(cfg.pde);
        if (doc.contains("name")) cfg.name = get_string(doc["name"], "name");
        if (doc.contains("domain")) parse_domain(doc["domain"], cfg.domain);
        if (!doc.contains("initial_condition")) throw ConfigError("initial_condition: required");
        parse_profile(doc["initial_condition"], cfg.profile);
        if (doc.contains("collocation")) parse_collocation(doc["collocation"], cfg);
        if (doc.contains("catalog")) parse_catalog(doc["catalog"], cfg);
        if (doc.contains("solver")) parse_solver(doc["solver"], cfg.solver);
        if (doc.contains("reference")) parse_reference(doc["reference"], cfg);
        if (doc.contains("output")) parse_output(doc["output"], cfg);
        if (cfg.name.empty()) {
            cfg.name = std::string(to_string(cfg.pde)) + "_" +
                       std::string(to_string(cfg.profile.kind));
        }
        // Catches bad catalog overrides and IC/edge incompatibilities up front.
        with_path("catalog", [&] { (void)build_catalog(cfg); });
        const IbvpProblem problem = with_path(
            "initial_condition", [&] { return build_problem(cfg.pde, cfg.profile, cfg.domain); });
        with_path("collocation", [&] {
            (void)sample_training_set(problem, cfg.collocation_points,
                                      component_fractions(cfg, problem), cfg.collocation_seed);
        });
        return cfg;
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    } catch (const Error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto cfg = parse_run_config(ss.str(), path.string());
    if (cfg.name.empty()) cfg.name = path.stem().string();
    return cfg;
}

void apply_seed(RunConfig& cfg, std::uint64_t seed) {
    cfg.solver.seed = seed;
    cfg.collocation_seed = seed;
}

Catalog build_catalog(const RunConfig& cfg) {
    const Catalog defaults = default_catalog(cfg.pde, cfg.domain);
    if (cfg.catalog.empty()) return defaults;
    Catalog out;
    for (const auto& spec : cfg.catalog) {
        auto family = std::make_shared<BaseFamily>(*find_family(defaults, spec.id));
        for (const auto& [name, bounds] : spec.bounds) {
            family->params[family->param_index(name)].bounds = bounds;
        }
        for (const auto& [name, rule] : spec.sampling) {
            family->params[family->param_index(name)].rule = rule;
        }
        family->validate(cfg.domain);
        for (const auto& f : out) {
            if (f->id == family->id) throw ConfigError("family '" + spec.id + "' listed twice");
        }
        out.push_back(std::move(family));
    }
    return out;
}

std::string RunConfig::canonical() const {
    json alloc = json::object();
    for (const auto& [id, f] : allocation) alloc[std::string(to_string(id))] = f;
    json weights = json::object();
    for (const auto& [id, w] : solver.component_weights) weights[std::string(to_string(id))] = w;
    json families = json::array();
    for (const auto& f : build_catalog(*this)) {
        json bounds = json::object();
        json sampling = json::object();
        for (const auto& p : f->params) {
            bounds[p.name] = {p.bounds.lo, p.bounds.hi};
            sampling[p.name] = to_string(p.rule);
        }
        families.push_back({{"family", f->id}, {"bounds", bounds}, {"sampling", sampling}});
    }
    const json doc = {
        {"pde", to_string(pde)},
        {"domain", {{"x_min", domain.x_min}, {"x_max", domain.x_max},
                    {"t_min", domain.t_min}, {"t_max", domain.t_max}}},
        {"initial_condition", {{"profile", to_string(profile.kind)}, {"parameters", profile.parameters}}},
        {"collocation", {{"points", collocation_points}, {"allocation", alloc}, {"seed", collocation_seed}}},
        {"catalog", families},
        {"solver",
         {{"mse_tol", solver.mse_tol},
          {"max_terms", solver.max_terms},
          {"candidates_per_family", solver.candidates_per_family},
          {"additions_per_refine", solver.additions_per_refine},
          {"ridge_lambda", solver.ridge_lambda},
          {"seed", solver.seed},
          {"component_weights", weights},
          {"refine",
           {{"nfev_global", solver.refine.max_iterations},
            {"fd_step", solver.refine.fd_step},
            {"initial_radius", solver.refine.initial_radius},
            {"expand", solver.refine.expand},
            {"shrink", solver.refine.shrink},
            {"gradient_tol", solver.refine.gradient_tol},
            {"step_tol", solver.refine.step_tol},
            {"max_rejections", solver.refine.max_rejections}}}}},
        {"reference", {{"modes", reference_modes}, {"grid", {{"nx", grid_nx}, {"nt", grid_nt}}}}},
    };
    return doc.dump();
}

} // namespace liesym::app
