#include "liesym/geometry.hpp"

#include "liesym/errors.hpp"
#include "liesym/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace liesym {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Relative end-point mismatch tolerated for the wave problem's zero edges.
constexpr double kWaveCornerTolerance = 1e-2;

} // namespace

std::string_view to_string(PdeKind kind) { return kind == PdeKind::Heat ? "heat" : "wave"; }

PdeKind parse_pde_kind(std::string_view name) {
    if (name == "heat") return PdeKind::Heat;
    if (name == "wave") return PdeKind::Wave;
    throw ConfigError("unknown pde kind '" + std::string(name) + "' (expected heat or wave)");
}

void Domain::validate() const {
    if (!(x_min < x_max)) throw ConfigError("domain requires x_min < x_max");
    if (!(t_min < t_max)) throw ConfigError("domain requires t_min < t_max");
}

bool Domain::contains(double x, double t, double tol) const {
    return x >= x_min - tol && x <= x_max + tol && t >= t_min - tol && t <= t_max + tol;
}

std::string_view to_string(ComponentId id) {
    switch (id) {
    case ComponentId::InitialLine: return "initial";
    case ComponentId::LeftEdge: return "left";
    case ComponentId::RightEdge: return "right";
    case ComponentId::InitialVelocityLine: return "initial_velocity";
    }
    return "?";
}

ComponentId parse_component_id(std::string_view name) {
    for (auto id : {ComponentId::InitialLine, ComponentId::LeftEdge, ComponentId::RightEdge,
                    ComponentId::InitialVelocityLine}) {
        if (name == to_string(id)) return id;
    }
    throw ConfigError("unknown boundary component '" + std::string(name) +
                      "' (expected initial, left, right or initial_velocity)");
}

bool BoundaryComponent::contains(const Point& p, double tol) const {
    const double ex = end.x - start.x;
    const double et = end.t - start.t;
    const double len2 = ex * ex + et * et;
    const double s = std::clamp(((p.x - start.x) * ex + (p.t - start.t) * et) / len2, 0.0, 1.0);
    const Point q = at(s);
    return std::abs(q.x - p.x) <= tol && std::abs(q.t - p.t) <= tol;
}

std::string_view to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::Polynomial: return "polynomial";
    case ProfileKind::Gaussian: return "gaussian";
    case ProfileKind::Sine: return "sine";
    case ProfileKind::SineMix: return "sine_mix";
    case ProfileKind::GaussianMix: return "gaussian_mix";
    case ProfileKind::Step: return "step";
    }
    return "?";
}

ProfileKind parse_profile_kind(std::string_view name) {
    for (auto kind : {ProfileKind::Polynomial, ProfileKind::Gaussian, ProfileKind::Sine,
                      ProfileKind::SineMix, ProfileKind::GaussianMix, ProfileKind::Step}) {
        if (to_string(kind) == name) return kind;
    }
    throw ConfigError("unknown initial-condition profile '" + std::string(name) + "'");
}

IcProfile IcProfile::defaults(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::Polynomial: {
        // c * x (1 - x) (x + 1/2), scaled to unit peak on [0, 1].
        // p(x) = -x^3 + x^2/2 + x/2, peak where 3x^2 - x - 1/2 = 0.
        const double xp = (1.0 + std::sqrt(7.0)) / 6.0;
        const double peak = xp * (1.0 - xp) * (xp + 0.5);
        const double c = 1.0 / peak;
        return {kind, {0.0, 0.5 * c, 0.5 * c, -c}};
    }
    case ProfileKind::Gaussian: return {kind, {1.0, 0.5, 0.08}};
    case ProfileKind::Sine: return {kind, {1.0, 1.0}};
    case ProfileKind::SineMix: return {kind, {1.0, 1.0, 0.5, 4.0}};
    case ProfileKind::GaussianMix: return {kind, {1.0, 0.3, 0.06, 0.7, 0.65, 0.08}};
    case ProfileKind::Step: return {kind, {1.0, 0.25, 0.75}};
    }
    throw ConfigError("unknown profile kind");
}

void IcProfile::validate() const {
    const auto n = parameters.size();
    auto fail = [&](const char* what) {
        throw ConfigError(std::string("profile '") + std::string(to_string(kind)) + "': " + what);
    };
    for (double p : parameters) {
        if (!std::isfinite(p)) fail("parameters must be finite");
    }
    switch (kind) {
    case ProfileKind::Polynomial:
        if (n == 0) fail("needs at least one coefficient");
        break;
    case ProfileKind::Gaussian:
        if (n != 3) fail("expects [amplitude, center, width]");
        if (!(parameters[2] > 0)) fail("width must be positive");
        break;
    case ProfileKind::Sine:
        if (n != 2) fail("expects [amplitude, k]");
        break;
    case ProfileKind::SineMix:
        if (n == 0 || n % 2 != 0) fail("expects (amplitude, k) pairs");
        break;
    case ProfileKind::GaussianMix:
        if (n == 0 || n % 3 != 0) fail("expects (amplitude, center, width) triples");
        for (std::size_t i = 2; i < n; i += 3) {
            if (!(parameters[i] > 0)) fail("widths must be positive");
        }
        break;
    case ProfileKind::Step:
        if (n != 3) fail("expects [amplitude, left jump, right jump]");
        if (!(parameters[1] < parameters[2])) fail("left jump must precede right jump");
        break;
    }
}

double IcProfile::amplitude_bound() const {
    double sum = 0.0;
    switch (kind) {
    case ProfileKind::Polynomial:
        for (double c : parameters) sum += std::abs(c);
        return sum;
    case ProfileKind::Gaussian:
    case ProfileKind::Sine:
    case ProfileKind::Step:
        return std::abs(parameters[0]);
    case ProfileKind::SineMix:
        for (std::size_t i = 0; i < parameters.size(); i += 2) sum += std::abs(parameters[i]);
        return sum;
    case ProfileKind::GaussianMix:
        for (std::size_t i = 0; i < parameters.size(); i += 3) sum += std::abs(parameters[i]);
        return sum;
    }
    return sum;
}

std::vector<double> IcProfile::jumps() const {
    if (kind != ProfileKind::Step) return {};
    return {parameters[1], parameters[2]};
}

double eval_profile(const IcProfile& profile, double x) {
    const auto& p = profile.parameters;
    switch (profile.kind) {
    case ProfileKind::Polynomial: {
        double acc = 0.0;
        for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    case ProfileKind::Gaussian: {
        const double z = (x - p[1]) / p[2];
        return p[0] * std::exp(-0.5 * z * z);
    }
    case ProfileKind::Sine: return p[0] * std::sin(p[1] * kPi * x);
    case ProfileKind::SineMix: {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.size(); i += 2) acc += p[i] * std::sin(p[i + 1] * kPi * x);
        return acc;
    }
    case ProfileKind::GaussianMix: {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.size(); i += 3) {
            const double z = (x - p[i + 1]) / p[i + 2];
            acc += p[i] * std::exp(-0.5 * z * z);
        }
        return acc;
    }
    case ProfileKind::Step: return (x > p[1] && x <= p[2]) ? p[0] : 0.0;
    }
    return 0.0;
}

const BoundaryComponent& IbvpProblem::component(ComponentId id) const {
    for (const auto& c : components) {
        if (c.id == id) return c;
    }
    throw ConfigError("problem has no component '" + std::string(to_string(id)) + "'");
}

IbvpProblem build_problem(PdeKind pde, const IcProfile& profile, const Domain& domain) {
    domain.validate();
    profile.validate();
    if (profile.kind == ProfileKind::Step) {
        for (double j : profile.jumps()) {
            if (!(j > domain.x_min && j < domain.x_max)) {
                throw ConfigError("step jumps must lie strictly inside the domain");
            }
        }
    }

    IbvpProblem problem;
    problem.pde = pde;
    problem.domain = domain;
    problem.profile = profile;

    const Point bl{domain.x_min, domain.t_min};
    const Point br{domain.x_max, domain.t_min};
    const Point tl{domain.x_min, domain.t_max};
    const Point tr{domain.x_max, domain.t_max};

    problem.components.push_back({ComponentId::InitialLine, ConditionKind::Value, bl, br,
                                  [profile](double x, double) { return eval_profile(profile, x); }});

    if (pde == PdeKind::Heat) {
        const double left = eval_profile(profile, domain.x_min);
        const double right = eval_profile(profile, domain.x_max);
        problem.components.push_back({ComponentId::LeftEdge, ConditionKind::Value, bl, tl,
                                      [left](double, double) { return left; }});
        problem.components.push_back({ComponentId::RightEdge, ConditionKind::Value, br, tr,
                                      [right](double, double) { return right; }});
    } else {
        const double scale = std::max(profile.amplitude_bound(), 1e-300);
        const double left = eval_profile(profile, domain.x_min);
        const double right = eval_profile(profile, domain.x_max);
        if (std::abs(left) > kWaveCornerTolerance * scale ||
            std::abs(right) > kWaveCornerTolerance * scale) {
            throw ConfigError("profile '" + std::string(to_string(profile.kind)) +
                              "' does not vanish at the ends; incompatible with zero wave edges");
        }
        auto zero = [](double, double) { return 0.0; };
        problem.components.push_back(
            {ComponentId::InitialVelocityLine, ConditionKind::TimeDerivative, bl, br, zero});
        problem.components.push_back({ComponentId::LeftEdge, ConditionKind::Value, bl, tl, zero});
        problem.components.push_back({ComponentId::RightEdge, ConditionKind::Value, br, tr, zero});
    }
    return problem;
}

std::size_t TrainingSet::count(ComponentId id) const {
    return static_cast<std::size_t>(std::count(components.begin(), components.end(), id));
}

bool TrainingSet::has_derivative_rows() const {
    return std::find(kinds.begin(), kinds.end(), ConditionKind::TimeDerivative) != kinds.end();
}

std::vector<double> default_allocation(const IbvpProblem& problem) {
    if (problem.pde == PdeKind::Heat) return {0.5, 0.25, 0.25};
    return {0.375, 0.125, 0.25, 0.25};
}

std::vector<std::size_t> allocate_counts(std::size_t total, std::span<const double> fractions) {
    std::vector<std::size_t> counts(fractions.size());
    std::vector<double> remainder(fractions.size());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        const double exact = fractions[i] * static_cast<double>(total);
        // Snap values within rounding noise of an integer (e.g. 0.375 * 3000).
        const double snapped = std::round(exact);
        const double base = std::abs(exact - snapped) < 1e-9 ? snapped : std::floor(exact);
        counts[i] = static_cast<std::size_t>(base);
        remainder[i] = exact - base;
        assigned += counts[i];
    }
    std::vector<std::size_t> order(fractions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
        ++counts[order[k]];
        ++assigned;
    }
    return counts;
}

TrainingSet sample_training_set(const IbvpProblem& problem, std::size_t total,
                                std::span<const double> allocation, std::uint64_t rng_seed) {
    const auto& comps = problem.components;
    if (allocation.size() != comps.size()) {
        throw ConfigError("allocation has " + std::to_string(allocation.size()) +
                          " fractions but the problem has " + std::to_string(comps.size()) +
                          " components");
    }
    if (total < comps.size()) {
        throw ConfigError("collocation total " + std::to_string(total) +
                          " is smaller than the number of boundary components");
    }
    double sum = 0.0;
    for (double f : allocation) {
        if (!(f >= 0.0)) throw ConfigError("allocation fractions must be non-negative");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("allocation fractions must sum to 1");

    const auto counts = allocate_counts(total, allocation);
    Rng rng(rng_seed);
    TrainingSet set;
    set.x.reserve(total);
    set.t.reserve(total);
    set.targets.reserve(total);
    set.kinds.reserve(total);
    set.components.reserve(total);
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const auto& c = comps[k];
        for (std::size_t i = 0; i < counts[k]; ++i) {
            const double s = rng.uniform01();
            // Keep the constant coordinate bit-exact on axis-aligned segments.
            Point p = c.at(s);
            if (c.start.x == c.end.x) p.x = c.start.x;
            if (c.start.t == c.end.t) p.t = c.start.t;
            set.x.push_back(p.x);
            set.t.push_back(p.t);
            set.targets.push_back(c.target(p.x, p.t));
            set.kinds.push_back(c.condition);
            set.components.push_back(c.id);
        }
    }
    return set;
}

} // namespace liesym
