#include "liesym/reference.hpp"

#include "liesym/errors.hpp"
#include "liesym/parallel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace liesym {

double FourierReference::omega(std::size_t m) const {
    return static_cast<double>(m) * std::numbers::pi / (domain.x_max - domain.x_min);
}

double FourierReference::lift(double x) const {
    const double s = (x - domain.x_min) / (domain.x_max - domain.x_min);
    return b_left + (b_right - b_left) * s;
}

namespace {

constexpr std::size_t kEdgeProbes = 17;

bool edge_is_constant(const BoundaryComponent& edge, double value, double tol) {
    for (std::size_t k = 0; k < kEdgeProbes; ++k) {
        const Point p = edge.at(static_cast<double>(k) / (kEdgeProbes - 1));
        if (std::abs(edge.target(p.x, p.t) - value) > tol) return false;
    }
    return true;
}

std::vector<double> sine_project(const std::vector<double>& samples) {
    const std::size_t M = samples.size();
    const double n1 = static_cast<double>(M + 1);
    std::vector<double> coef(M, 0.0);
    for (std::size_t k = 1; k <= M; ++k) {
        double s = 0.0;
        for (std::size_t m = 1; m <= M; ++m) {
            // Integer phase reduction keeps the angle small for large k*m.
            const std::size_t r = (k * m) % (2 * (M + 1));
            s += samples[m - 1] * std::sin(std::numbers::pi * static_cast<double>(r) / n1);
        }
        coef[k - 1] = 2.0 / n1 * s;
    }
    return coef;
}

} // namespace

FourierReference build_reference(const IbvpProblem& problem, std::size_t modes) {
    if (modes == 0) throw ConfigError("reference.modes must be >= 1");
    const Domain& d = problem.domain;
    FourierReference ref;
    ref.pde = problem.pde;
    ref.domain = d;

    const auto& ic = problem.component(ComponentId::InitialLine);
    const auto& left = problem.component(ComponentId::LeftEdge);
    const auto& right = problem.component(ComponentId::RightEdge);
    const double scale = 1.0 + std::abs(left.target(d.x_min, d.t_min)) +
                         std::abs(right.target(d.x_max, d.t_min));
    const double tol = 1e-12 * scale;

    if (problem.pde == PdeKind::Heat) {
        ref.b_left = left.target(d.x_min, d.t_min);
        ref.b_right = right.target(d.x_max, d.t_min);
        if (!edge_is_constant(left, ref.b_left, tol) || !edge_is_constant(right, ref.b_right, tol)) {
            throw ConfigError("heat reference needs constant edge values");
        }
    } else {
        if (!edge_is_constant(left, 0.0, tol) || !edge_is_constant(right, 0.0, tol)) {
            throw ConfigError("wave reference needs zero edge values");
        }
    }

    const double len = d.x_max - d.x_min;
    std::vector<double> u0(modes), v0(modes);
    for (std::size_t m = 1; m <= modes; ++m) {
        const double x = d.x_min + len * static_cast<double>(m) / static_cast<double>(modes + 1);
        u0[m - 1] = ic.target(x, d.t_min) - ref.lift(x);
        if (problem.pde == PdeKind::Wave) {
            v0[m - 1] = problem.component(ComponentId::InitialVelocityLine).target(x, d.t_min);
        }
    }
    ref.A = sine_project(u0);
    if (problem.pde == PdeKind::Wave) ref.B = sine_project(v0);
    return ref;
}

double eval_reference(const FourierReference& ref, double x, double t) {
    const Domain& d = ref.domain;
    const double len = d.x_max - d.x_min;
    const double xi = std::numbers::pi * (x - d.x_min) / len;
    const double tau = t - d.t_min;
    double sum = 0.0;
    if (ref.pde == PdeKind::Heat) {
        for (std::size_t m = 1; m <= ref.modes(); ++m) {
            const double w = ref.omega(m);
            const double decay = std::exp(-w * w * tau);
            if (decay == 0.0) break;
            sum += ref.A[m - 1] * std::sin(static_cast<double>(m) * xi) * decay;
        }
        return ref.lift(x) + sum;
    }
    for (std::size_t m = 1; m <= ref.modes(); ++m) {
        const double w = ref.omega(m);
        const double temporal = ref.A[m - 1] * std::cos(w * tau) + ref.B[m - 1] / w * std::sin(w * tau);
        sum += temporal * std::sin(static_cast<double>(m) * xi);
    }
    return sum;
}

Grid closure_grid(const Domain& domain, std::size_t nx, std::size_t nt) {
    if (nx < 2 || nt < 2) throw ConfigError("grid needs at least 2 nodes per axis");
    Grid g;
    g.nx = nx;
    g.nt = nt;
    g.x.reserve(nx * nt);
    g.t.reserve(nx * nt);
    for (std::size_t j = 0; j < nt; ++j) {
        const double t = j + 1 == nt ? domain.t_max
                                     : domain.t_min + (domain.t_max - domain.t_min) *
                                                          static_cast<double>(j) / static_cast<double>(nt - 1);
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = i + 1 == nx ? domain.x_max
                                         : domain.x_min + (domain.x_max - domain.x_min) *
                                                              static_cast<double>(i) / static_cast<double>(nx - 1);
            g.x.push_back(x);
            g.t.push_back(t);
        }
    }
    return g;
}

std::vector<double> eval_reference(const FourierReference& ref, const Grid& grid) {
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = eval_reference(ref, grid.x[i], grid.t[i]); });
    return out;
}

double l2re(std::span<const double> pred, std::span<const double> ref) {
    if (pred.size() != ref.size()) throw MetricError("l2re: field sizes differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double e = pred[i] - ref[i];
        num += e * e;
        den += ref[i] * ref[i];
    }
    if (!(den > 0.0)) throw MetricError("l2re: reference field has zero norm");
    return std::sqrt(num / den);
}

} // namespace liesym
