#include "liesym/symmetry.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>

namespace liesym {

namespace {

struct TransformName {
    TransformId id;
    std::string_view name;
};

constexpr std::array<TransformName, 8> kTransformNames{{
    {TransformId::HeatT1, "heat_t1"},
    {TransformId::HeatT2, "heat_t2"},
    {TransformId::HeatT3, "heat_t3"},
    {TransformId::HeatT4, "heat_t4"},
    {TransformId::HeatT5, "heat_t5"},
    {TransformId::HeatT6, "heat_t6"},
    {TransformId::WaveT1, "wave_t1"},
    {TransformId::WaveT2, "wave_t2"},
}};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    std::string s(buf);
    if (v < 0) s = "(" + s + ")";
    return s;
}

} // namespace

std::string_view to_string(TransformId id) {
    for (const auto& e : kTransformNames) {
        if (e.id == id) return e.name;
    }
    return "?";
}

TransformId parse_transform_id(std::string_view name) {
    for (const auto& e : kTransformNames) {
        if (e.name == name) return e.id;
    }
    throw ConfigError("unknown transform '" + std::string(name) + "'");
}

std::string_view to_string(SeedId id) {
    switch (id) {
    case SeedId::Constant: return "constant";
    case SeedId::HeatSineDecay: return "sine_decay";
    case SeedId::WaveStanding: return "standing_wave";
    case SeedId::WaveBlobPair: return "blob_pair";
    }
    return "?";
}

SeedId parse_seed_id(std::string_view name) {
    for (auto id : {SeedId::Constant, SeedId::HeatSineDecay, SeedId::WaveStanding,
                    SeedId::WaveBlobPair}) {
        if (to_string(id) == name) return id;
    }
    throw ConfigError("unknown seed solution '" + std::string(name) + "'");
}

std::string_view to_string(SamplingRule rule) {
    return rule == SamplingRule::Uniform ? "uniform" : "log_uniform";
}

SamplingRule parse_sampling_rule(std::string_view name) {
    if (name == "uniform") return SamplingRule::Uniform;
    if (name == "log_uniform") return SamplingRule::LogUniform;
    throw ConfigError("unknown sampling rule '" + std::string(name) +
                      "' (expected uniform or log_uniform)");
}

PdeKind pde_of(TransformId id) {
    return (id == TransformId::WaveT1 || id == TransformId::WaveT2) ? PdeKind::Wave
                                                                    : PdeKind::Heat;
}

std::vector<SeedId> seeds_for(PdeKind pde) {
    if (pde == PdeKind::Heat) return {SeedId::Constant, SeedId::HeatSineDecay};
    return {SeedId::Constant, SeedId::WaveStanding, SeedId::WaveBlobPair};
}

bool seed_solves(SeedId seed, PdeKind pde) {
    const auto seeds = seeds_for(pde);
    return std::find(seeds.begin(), seeds.end(), seed) != seeds.end();
}

LieTransform LieTransform::make(TransformId id, const Domain& domain, double t6_max) {
    LieTransform tr;
    tr.id = id;
    if (id == TransformId::HeatT6) {
        // Covers every t in [t_min, t_max] with t_max > 0; negative parameters are
        // only safe while 1 + 4 a t_max > 0.
        const double t_far = std::max(std::abs(domain.t_min), std::abs(domain.t_max));
        tr.bounds = {-1.0 / (4.0 * t_far) + kHeatT6Margin, t6_max};
        tr.sampling = SamplingRule::Uniform;
    }
    return tr;
}

void LieTransform::check(double theta) const {
    if (!std::isfinite(theta) || !bounds.contains(theta)) {
        throw ParameterError("parameter " + std::to_string(theta) + " outside bounds of " +
                             std::string(to_string(id)) + " [" + std::to_string(bounds.lo) +
                             ", " + std::to_string(bounds.hi) + "]");
    }
}

Jet eval_chain(const TransformChain& chain, double x, double t) {
    if (chain.params.size() != chain.transforms.size()) {
        throw ParameterError("transform chain has mismatched parameter count");
    }
    return chain.evaluate(Jet::x_seed(x), Jet::t_seed(t));
}

double eval_chain_value(const TransformChain& chain, double x, double t) {
    if (chain.params.size() != chain.transforms.size()) {
        throw ParameterError("transform chain has mismatched parameter count");
    }
    return chain.evaluate(x, t);
}

std::string render_chain(const TransformChain& chain) {
    // Same pull-back as transform_step, on expression strings.
    std::string x = "x";
    std::string t = "t";
    std::vector<std::string> factors;
    for (std::size_t k = chain.transforms.size(); k-- > 0;) {
        const double a = chain.params[k];
        switch (chain.transforms[k]) {
        case TransformId::HeatT1:
        case TransformId::WaveT1: x = "(" + x + " - " + num(a) + ")"; break;
        case TransformId::HeatT2: t = "(" + t + " - " + num(a) + ")"; break;
        case TransformId::HeatT3: factors.push_back("exp(" + num(a) + ")"); break;
        case TransformId::HeatT4: {
            const double s = std::exp(-a);
            x = "(" + num(s) + "*" + x + ")";
            t = "(" + num(s * s) + "*" + t + ")";
            break;
        }
        case TransformId::HeatT5:
            factors.push_back("exp(" + num(a * a) + "*" + t + " - " + num(a) + "*" + x + ")");
            x = "(" + x + " - " + num(2.0 * a) + "*" + t + ")";
            break;
        case TransformId::HeatT6: {
            const std::string s = "(1 + " + num(4.0 * a) + "*" + t + ")";
            factors.push_back("exp(-" + num(a) + "*" + x + "^2/" + s + ")/sqrt(" + s + ")");
            x = "(" + x + "/" + s + ")";
            t = "(" + t + "/" + s + ")";
            break;
        }
        case TransformId::WaveT2: {
            const double s = std::exp(a);
            x = "(" + num(s) + "*" + x + ")";
            t = "(" + num(s) + "*" + t + ")";
            break;
        }
        }
    }
    std::string seed;
    switch (chain.seed) {
    case SeedId::Constant: seed = "1"; break;
    case SeedId::HeatSineDecay: seed = "sin(" + x + ")*exp(-" + t + ")"; break;
    case SeedId::WaveStanding: seed = "sin(" + x + ")*cos(" + t + ")"; break;
    case SeedId::WaveBlobPair:
        seed = "(exp(-(" + x + " - " + t + ")^2) + exp(-(" + x + " + " + t + ")^2))";
        break;
    }
    std::string out;
    for (const auto& f : factors) out += f + "*";
    return out + seed;
}

SolutionFn seed_function(SeedId seed) {
    return [seed](double x, double t) {
        return eval_seed(seed, Jet::x_seed(x), Jet::t_seed(t));
    };
}

SolutionFn apply_transform(const LieTransform& transform, SolutionFn f, double theta) {
    transform.check(theta);
    const TransformId id = transform.id;
    return [id, theta, inner = std::move(f)](double x, double t) {
        Jet X = Jet::x_seed(x);
        Jet T = Jet::t_seed(t);
        Jet factor(1.0);
        transform_step(id, theta, X, T, factor);
        const Jet u = inner(X.v, T.v);
        const Jet composed{u.v, u.dx * X.dx + u.dt * T.dx, u.dx * X.dt + u.dt * T.dt};
        return factor * composed;
    };
}

std::vector<Point> interior_grid(const Domain& domain, std::size_t n_x, std::size_t n_t) {
    std::vector<Point> grid;
    grid.reserve(n_x * n_t);
    for (std::size_t j = 1; j <= n_t; ++j) {
        const double t = domain.t_min + domain.duration() * static_cast<double>(j) /
                                            static_cast<double>(n_t + 1);
        for (std::size_t i = 1; i <= n_x; ++i) {
            const double x = domain.x_min + domain.length() * static_cast<double>(i) /
                                                static_cast<double>(n_x + 1);
            grid.push_back({x, t});
        }
    }
    return grid;
}

namespace {

// Central-difference weights for offsets -3..3.
constexpr std::array<double, 7> kD1Order2{0, 0, -0.5, 0, 0.5, 0, 0};
constexpr std::array<double, 7> kD2Order2{0, 0, 1, -2, 1, 0, 0};
constexpr std::array<double, 7> kD1Order6{-1.0 / 60, 9.0 / 60, -45.0 / 60, 0,
                                          45.0 / 60, -9.0 / 60, 1.0 / 60};
constexpr std::array<double, 7> kD2Order6{2.0 / 180,   -27.0 / 180, 270.0 / 180, -490.0 / 180,
                                          270.0 / 180, -27.0 / 180, 2.0 / 180};

template <class Sample>
double stencil(const std::array<double, 7>& w, Sample&& sample) {
    double acc = 0.0;
    for (int k = -3; k <= 3; ++k) {
        const double c = w[static_cast<std::size_t>(k + 3)];
        if (c != 0.0) acc += c * sample(k);
    }
    return acc;
}

} // namespace

double pde_residual(PdeKind pde, const std::function<double(double, double)>& f,
                    std::span<const Point> grid, const FdOptions& fd) {
    if (fd.order != 2 && fd.order != 6) throw ConfigError("fd order must be 2 or 6");
    const auto& d1 = fd.order == 2 ? kD1Order2 : kD1Order6;
    const auto& d2 = fd.order == 2 ? kD2Order2 : kD2Order6;
    const double hx = fd.step_x;
    const double ht = fd.step_t;

    double worst = 0.0;
    for (const auto& p : grid) {
        const double uxx =
            stencil(d2, [&](int k) { return f(p.x + k * hx, p.t); }) / (hx * hx);
        double lhs = 0.0;
        if (pde == PdeKind::Heat) {
            lhs = stencil(d1, [&](int k) { return f(p.x, p.t + k * ht); }) / ht;
        } else {
            lhs = stencil(d2, [&](int k) { return f(p.x, p.t + k * ht); }) / (ht * ht);
        }
        const double r = std::abs(lhs - uxx);
        if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, r);
    }
    return worst;
}

} // namespace liesym
