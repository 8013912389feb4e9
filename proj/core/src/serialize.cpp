#include "liesym/errors.hpp"
#include "liesym/solver.hpp"

#include <nlohmann/json.hpp>

#include <memory>

namespace liesym {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "liesym.model";
constexpr int kFormatVersion = 1;

json family_to_json(const BaseFamily& f) {
    json steps = json::array();
    for (const auto& s : f.steps) {
        steps.push_back({{"transform", to_string(s.transform)},
                         {"param", s.param},
                         {"map", to_string(s.map)}});
    }
    json params = json::array();
    for (const auto& p : f.params) {
        params.push_back({{"name", p.name},
                          {"lo", p.bounds.lo},
                          {"hi", p.bounds.hi},
                          {"rule", to_string(p.rule)}});
    }
    return {{"id", f.id},
            {"pde", to_string(f.pde)},
            {"seed", to_string(f.seed)},
            {"steps", steps},
            {"params", params},
            {"description", f.description}};
}

FamilyPtr family_from_json(const json& j, const Domain& domain) {
    auto f = std::make_shared<BaseFamily>();
    f->id = j.at("id").get<std::string>();
    f->pde = parse_pde_kind(j.at("pde").get<std::string>());
    f->seed = parse_seed_id(j.at("seed").get<std::string>());
    for (const auto& s : j.at("steps")) {
        ChainStep step;
        step.transform = parse_transform_id(s.at("transform").get<std::string>());
        step.param = s.at("param").get<std::size_t>();
        step.map = parse_param_map(s.at("map").get<std::string>());
        f->steps.push_back(step);
    }
    for (const auto& p : j.at("params")) {
        ParamSpec spec;
        spec.name = p.at("name").get<std::string>();
        spec.bounds = {p.at("lo").get<double>(), p.at("hi").get<double>()};
        spec.rule = parse_sampling_rule(p.at("rule").get<std::string>());
        f->params.push_back(spec);
    }
    f->description = j.value("description", std::string{});
    f->validate(domain);
    return f;
}

} // namespace

std::string model_to_json(const Model& model) {
    model.validate();
    json families = json::array();
    std::vector<const BaseFamily*> seen;
    json terms = json::array();
    for (std::size_t k = 0; k < model.terms.size(); ++k) {
        const auto& term = model.terms[k];
        bool known = false;
        for (const auto* f : seen) known = known || f == term.family.get();
        if (!known) {
            seen.push_back(term.family.get());
            families.push_back(family_to_json(*term.family));
        }
        terms.push_back({{"family", term.family->id},
                         {"params", term.params},
                         {"amplitude", model.amplitudes[k]},
                         {"expression", render_chain(term.chain())}});
    }
    const json doc = {{"format", kFormat},
                      {"version", kFormatVersion},
                      {"pde", to_string(model.pde)},
                      {"domain",
                       {{"x_min", model.domain.x_min},
                        {"x_max", model.domain.x_max},
                        {"t_min", model.domain.t_min},
                        {"t_max", model.domain.t_max}}},
                      {"seed", model.seed},
                      {"config_hash", model.config_hash},
                      {"parameter_count", model.parameter_count()},
                      {"families", families},
                      {"terms", terms},
                      {"symbolic", render_symbolic(model)}};
    return doc.dump(2);
}

Model model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.value("format", std::string{}) != kFormat) {
            throw ConfigError("not a liesym model document");
        }
        if (doc.value("version", 0) != kFormatVersion) {
            throw ConfigError("unsupported model format version");
        }
        Model model;
        model.pde = parse_pde_kind(doc.at("pde").get<std::string>());
        const auto& d = doc.at("domain");
        model.domain = {d.at("x_min").get<double>(), d.at("x_max").get<double>(),
                        d.at("t_min").get<double>(), d.at("t_max").get<double>()};
        model.domain.validate();
        model.seed = doc.value("seed", std::uint64_t{0});
        model.config_hash = doc.value("config_hash", std::string{});

        Catalog families;
        for (const auto& f : doc.at("families")) {
            families.push_back(family_from_json(f, model.domain));
        }
        for (const auto& t : doc.at("terms")) {
            const auto family = find_family(families, t.at("family").get<std::string>());
            auto params = t.at("params").get<std::vector<double>>();
            family->check_params(params);
            model.terms.push_back({family, std::move(params)});
            model.amplitudes.push_back(t.at("amplitude").get<double>());
        }
        return model;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed model document: ") + e.what());
    }
}

} // namespace liesym
