#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace liesym {

enum class PdeKind { Heat, Wave };

std::string_view to_string(PdeKind kind);
PdeKind parse_pde_kind(std::string_view name);

struct Point {
    double x = 0.0;
    double t = 0.0;
};

/// Rectangular space-time domain (x_min, x_max) x (t_min, t_max).
struct Domain {
    double x_min = 0.0;
    double x_max = 1.0;
    double t_min = 0.0;
    double t_max = 0.1;

    static Domain heat_default() { return {0.0, 1.0, 0.0, 0.1}; }
    static Domain wave_default() { return {0.0, 1.0, 0.0, 1.0}; }
    static Domain default_for(PdeKind kind) {
        return kind == PdeKind::Heat ? heat_default() : wave_default();
    }

    double length() const { return x_max - x_min; }
    double duration() const { return t_max - t_min; }

    /// Throws ConfigError unless x_min < x_max and t_min < t_max.
    void validate() const;

    /// True when (x, t) lies in the closure, up to an absolute tolerance.
    bool contains(double x, double t, double tol = 1e-12) const;
};

enum class ComponentId { InitialLine, LeftEdge, RightEdge, InitialVelocityLine };
enum class ConditionKind { Value, TimeDerivative };

std::string_view to_string(ComponentId id);
ComponentId parse_component_id(std::string_view name);

/// One piece Gamma_k of the parabolic boundary with the condition imposed on it.
struct BoundaryComponent {
    ComponentId id = ComponentId::InitialLine;
    ConditionKind condition = ConditionKind::Value;
    Point start;
    Point end;
    std::function<double(double x, double t)> target;

    /// Point at segment parameter s in [0, 1].
    Point at(double s) const {
        return {start.x + s * (end.x - start.x), start.t + s * (end.t - start.t)};
    }

    /// Geometric predicate: the point lies on this segment (within tol).
    bool contains(const Point& p, double tol = 1e-12) const;
};

enum class ProfileKind { Polynomial, Gaussian, Sine, SineMix, GaussianMix, Step };

std::string_view to_string(ProfileKind kind);
ProfileKind parse_profile_kind(std::string_view name);

/// Initial-condition profile u_0(x).
///
/// Parameter layouts:
///   Polynomial   c_0, c_1, ..., c_n            (sum c_k x^k)
///   Gaussian     amplitude, center, width
///   Sine         amplitude, k                  (amplitude sin(k pi x))
///   SineMix      (amplitude, k) pairs
///   GaussianMix  (amplitude, center, width) triples
///   Step         amplitude, left jump, right jump
///
/// Step takes the left limit at a jump, so it equals amplitude on (left, right].
struct IcProfile {
    ProfileKind kind = ProfileKind::Sine;
    std::vector<double> parameters;

    static IcProfile defaults(ProfileKind kind);

    /// Throws ConfigError when the parameter list does not fit the layout.
    void validate() const;

    /// Upper bound on |u_0| from the amplitude-like parameters.
    double amplitude_bound() const;

    /// Interior jump locations (Step only).
    std::vector<double> jumps() const;
};

double eval_profile(const IcProfile& profile, double x);

struct IbvpProblem {
    PdeKind pde = PdeKind::Heat;
    Domain domain;
    IcProfile profile;
    std::vector<BoundaryComponent> components;

    const BoundaryComponent& component(ComponentId id) const;
};

/// Heat: initial line plus constant-value edges u_0(x_min), u_0(x_max).
/// Wave: initial line, zero-velocity line and two zero edges.
IbvpProblem build_problem(PdeKind pde, const IcProfile& profile, const Domain& domain);

/// Collocation points on the IBC set with their targets.
struct TrainingSet {
    std::vector<double> x;
    std::vector<double> t;
    std::vector<double> targets;
    std::vector<ConditionKind> kinds;
    std::vector<ComponentId> components;

    std::size_t size() const { return targets.size(); }
    std::size_t count(ComponentId id) const;
    bool has_derivative_rows() const;
};

/// Half the budget on the initial line(s), the rest split equally over edges.
/// Wave problems split the initial half 3:1 between value and velocity lines.
std::vector<double> default_allocation(const IbvpProblem& problem);

/// Integer counts for the given fractions; remainders go to the largest
/// fractional parts, lowest index first.
std::vector<std::size_t> allocate_counts(std::size_t total, std::span<const double> fractions);

/// Uniform random points on each component, deterministic in rng_seed.
TrainingSet sample_training_set(const IbvpProblem& problem, std::size_t total,
                                std::span<const double> allocation, std::uint64_t rng_seed);

} // namespace liesym
