#include "liesym/bases.hpp"

#include "liesym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace liesym {

namespace {

double map_param(ParamMap map, double p) {
    switch (map) {
    case ParamMap::Identity: return p;
    case ParamMap::Log: return std::log(p);
    case ParamMap::NegLog: return -std::log(p);
    }
    return p;
}

ParamBounds map_bounds(ParamMap map, const ParamBounds& b) {
    switch (map) {
    case ParamMap::Identity: return b;
    case ParamMap::Log: return {std::log(b.lo), std::log(b.hi)};
    case ParamMap::NegLog: return {-std::log(b.hi), -std::log(b.lo)};
    }
    return b;
}

} // namespace

std::string_view to_string(ParamMap map) {
    switch (map) {
    case ParamMap::Identity: return "identity";
    case ParamMap::Log: return "log";
    case ParamMap::NegLog: return "neg_log";
    }
    return "?";
}

ParamMap parse_param_map(std::string_view name) {
    for (auto m : {ParamMap::Identity, ParamMap::Log, ParamMap::NegLog}) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown parameter map '" + std::string(name) + "'");
}

std::size_t BaseFamily::param_index(std::string_view name) const {
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].name == name) return i;
    }
    throw ConfigError("family '" + id + "' has no parameter '" + std::string(name) + "'");
}

void BaseFamily::validate(const Domain& domain) const {
    auto fail = [&](const std::string& what) { throw ConfigError("family '" + id + "': " + what); };
    if (!seed_solves(seed, pde)) fail("seed does not solve the family's equation");
    for (const auto& p : params) {
        if (!std::isfinite(p.bounds.lo) || !std::isfinite(p.bounds.hi) ||
            !(p.bounds.lo < p.bounds.hi)) {
            fail("parameter '" + p.name + "' needs finite bounds with lo < hi");
        }
        if (p.rule == SamplingRule::LogUniform && !(p.bounds.lo > 0.0)) {
            fail("log-uniform parameter '" + p.name + "' needs lo > 0");
        }
    }
    std::vector<bool> used(params.size(), false);
    for (const auto& s : steps) {
        if (s.param >= params.size()) fail("chain step refers to a missing parameter");
        if (pde_of(s.transform) != pde) fail("transform belongs to the other equation");
        used[s.param] = true;
        const auto& b = params[s.param].bounds;
        if (s.map != ParamMap::Identity && !(b.lo > 0.0)) {
            fail("parameter '" + params[s.param].name + "' is log-mapped and needs lo > 0");
        }
        const auto reach = map_bounds(s.map, b);
        const auto tr = LieTransform::make(s.transform, domain);
        if (!tr.bounds.contains(reach.lo) || !tr.bounds.contains(reach.hi)) {
            fail("parameter '" + params[s.param].name + "' reaches outside the admissible range of " +
                 std::string(to_string(s.transform)));
        }
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        fail("every parameter must drive a chain step");
    }
}

void BaseFamily::check_params(std::span<const double> values) const {
    if (values.size() != params.size()) {
        throw ParameterError("family '" + id + "' expects " + std::to_string(params.size()) +
                             " parameters, got " + std::to_string(values.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!std::isfinite(values[i]) || !params[i].bounds.contains(values[i])) {
            throw ParameterError("family '" + id + "' parameter '" + params[i].name + "' = " +
                                 std::to_string(values[i]) + " outside [" +
                                 std::to_string(params[i].bounds.lo) + ", " +
                                 std::to_string(params[i].bounds.hi) + "]");
        }
    }
}

TransformChain BaseFamily::bind(std::span<const double> values) const {
    TransformChain chain;
    chain.seed = seed;
    chain.transforms.reserve(steps.size());
    chain.params.reserve(steps.size());
    for (const auto& s : steps) {
        chain.transforms.push_back(s.transform);
        chain.params.push_back(map_param(s.map, values[s.param]));
    }
    return chain;
}

Catalog default_catalog(PdeKind pde, const Domain& domain) {
    constexpr double pi = std::numbers::pi;
    const double len = domain.length();
    // Frequencies in units of the unit-interval defaults, so a wider domain keeps
    // the same number of resolvable modes.
    const ParamBounds phase{-pi, pi};
    const ParamBounds frequency{0.5 / len, 60.0 / len};
    const ParamBounds center{domain.x_min - 0.5 * len, domain.x_max + 0.5 * len};

    Catalog catalog;
    if (pde == PdeKind::Heat) {
        const ParamBounds sharpness{1.0 / (len * len), 3e6 / (len * len)};
        catalog.push_back(std::make_shared<BaseFamily>(BaseFamily{
            "sine_mode", pde, SeedId::HeatSineDecay,
            {{TransformId::HeatT1, 0, ParamMap::Identity},
             {TransformId::HeatT4, 1, ParamMap::NegLog}},
            {{"phase", phase, SamplingRule::Uniform},
             {"frequency", frequency, SamplingRule::LogUniform}},
            "sin(frequency*x - phase) exp(-frequency^2 t)"}));
        catalog.push_back(std::make_shared<BaseFamily>(BaseFamily{
            "gaussian_blob", pde, SeedId::Constant,
            {{TransformId::HeatT6, 0, ParamMap::Identity},
             {TransformId::HeatT1, 1, ParamMap::Identity}},
            {{"sharpness", sharpness, SamplingRule::LogUniform},
             {"center", center, SamplingRule::Uniform}},
            "heat kernel blob exp(-sharpness (x-center)^2) at t=0"}));
        catalog.push_back(std::make_shared<BaseFamily>(BaseFamily{
            "modulated_blob", pde, SeedId::HeatSineDecay,
            {{TransformId::HeatT1, 0, ParamMap::Identity},
             {TransformId::HeatT4, 1, ParamMap::NegLog},
             {TransformId::HeatT6, 2, ParamMap::Identity},
             {TransformId::HeatT1, 3, ParamMap::Identity}},
            {{"phase", phase, SamplingRule::Uniform},
             {"frequency", frequency, SamplingRule::LogUniform},
             {"sharpness", sharpness, SamplingRule::LogUniform},
             {"center", center, SamplingRule::Uniform}},
            "gaussian blob modulated by a shifted, scaled sine"}));
    } else {
        const ParamBounds scale{0.5 / len, 60.0 / len};
        const ParamBounds blob_center{domain.x_min - len, domain.x_max + len};
        catalog.push_back(std::make_shared<BaseFamily>(BaseFamily{
            "standing_wave", pde, SeedId::WaveStanding,
            {{TransformId::WaveT1, 0, ParamMap::Identity},
             {TransformId::WaveT2, 1, ParamMap::Log}},
            {{"phase", phase, SamplingRule::Uniform},
             {"frequency", frequency, SamplingRule::LogUniform}},
            "sin(frequency*x - phase) cos(frequency*t)"}));
        catalog.push_back(std::make_shared<BaseFamily>(BaseFamily{
            "blob_pair", pde, SeedId::WaveBlobPair,
            {{TransformId::WaveT2, 0, ParamMap::Log},
             {TransformId::WaveT1, 1, ParamMap::Identity}},
            {{"scale", scale, SamplingRule::LogUniform},
             {"center", blob_center, SamplingRule::Uniform}},
            "travelling gaussian pair centred at center with inverse width scale"}));
    }
    for (const auto& f : catalog) f->validate(domain);
    return catalog;
}

FamilyPtr find_family(const Catalog& catalog, std::string_view id) {
    for (const auto& f : catalog) {
        if (f->id == id) return f;
    }
    throw ConfigError("unknown base family '" + std::string(id) + "'");
}

void eval_family_batch(const BaseFamily& family, std::span<const double> params,
                       std::span<const double> xs, std::span<const double> ts, EvalKind which,
                       std::span<double> out) {
    family.check_params(params);
    if (xs.size() != ts.size() || out.size() != xs.size()) {
        throw ConfigError("eval_family_batch: point and output sizes differ");
    }
    const TransformChain chain = family.bind(params);
    switch (which) {
    case EvalKind::Value:
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = chain.evaluate(xs[i], ts[i]);
        break;
    case EvalKind::DtValue:
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out[i] = chain.evaluate(Jet::x_seed(xs[i]), Jet::t_seed(ts[i])).dt;
        }
        break;
    case EvalKind::DxValue:
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out[i] = chain.evaluate(Jet::x_seed(xs[i]), Jet::t_seed(ts[i])).dx;
        }
        break;
    }
}

std::vector<double> eval_family_batch(const BaseFamily& family, std::span<const double> params,
                                      std::span<const double> xs, std::span<const double> ts,
                                      EvalKind which) {
    std::vector<double> out(xs.size());
    eval_family_batch(family, params, xs, ts, which, out);
    return out;
}

void eval_family_rows(const BaseFamily& family, std::span<const double> params,
                      const TrainingSet& rows, std::span<double> out) {
    const TransformChain chain = family.bind(params);
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (rows.kinds[i] == ConditionKind::Value) {
            out[i] = chain.evaluate(rows.x[i], rows.t[i]);
        } else {
            out[i] = chain.evaluate(Jet::x_seed(rows.x[i]), Jet::t_seed(rows.t[i])).dt;
        }
    }
}

std::vector<std::vector<double>> sample_params(const BaseFamily& family, std::size_t count,
                                               Rng& rng) {
    if (count == 0) throw ConfigError("sample_params needs at least one draw");
    for (const auto& p : family.params) {
        if (p.rule == SamplingRule::LogUniform && !(p.bounds.lo > 0.0)) {
            throw ConfigError("family '" + family.id + "' parameter '" + p.name +
                              "' is log-uniform with lo <= 0");
        }
    }
    std::vector<std::vector<double>> draws(count, std::vector<double>(family.params.size()));
    for (auto& draw : draws) {
        for (std::size_t j = 0; j < family.params.size(); ++j) {
            const auto& p = family.params[j];
            const double u = rng.uniform01();
            double v = 0.0;
            if (p.rule == SamplingRule::Uniform) {
                v = p.bounds.lo + (p.bounds.hi - p.bounds.lo) * u;
            } else {
                const double a = std::log(p.bounds.lo);
                const double b = std::log(p.bounds.hi);
                v = std::exp(a + (b - a) * u);
            }
            draw[j] = std::clamp(v, p.bounds.lo, p.bounds.hi);
        }
    }
    return draws;
}

} // namespace liesym
