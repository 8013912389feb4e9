#pragma once

#include "liesym/geometry.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace liesym {

/// Truncated sine series solution of the heat or wave IBVP on a rectangle
/// with Dirichlet edges (constant for heat, zero for wave).
struct FourierReference {
    PdeKind pde = PdeKind::Heat;
    Domain domain;
    std::vector<double> A;  // sine coefficients of the (lifted) initial value
    std::vector<double> B;  // wave only: sine coefficients of the initial velocity
    double b_left = 0.0;    // heat lift w(x) endpoints
    double b_right = 0.0;

    std::size_t modes() const { return A.size(); }
    /// m-th angular wavenumber m pi / (x_max - x_min), m >= 1.
    double omega(std::size_t m) const;
    /// Linear lift w(x) joining the heat edge values.
    double lift(double x) const;
};

/// Discrete sine projection at nodes x_min + m (x_max - x_min)/(M + 1),
/// m = 1..M, with weights 2/(M + 1). Throws ConfigError when the heat edges
/// are not constant, the wave edges are not zero, or modes == 0.
FourierReference build_reference(const IbvpProblem& problem, std::size_t modes);

/// Sum of the series at (x, t).
double eval_reference(const FourierReference& ref, double x, double t);

/// Tensor grid over the closure of a domain; t is the slow index.
struct Grid {
    std::size_t nx = 0;
    std::size_t nt = 0;
    std::vector<double> x;
    std::vector<double> t;

    std::size_t size() const { return x.size(); }
};

/// nx by nt uniform nodes including the domain corners.
Grid closure_grid(const Domain& domain, std::size_t nx, std::size_t nt);

std::vector<double> eval_reference(const FourierReference& ref, const Grid& grid);

/// ||pred - ref||_2 / ||ref||_2. Throws MetricError for a zero reference.
double l2re(std::span<const double> pred, std::span<const double> ref);

} // namespace liesym
