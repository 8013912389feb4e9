#pragma once

#include <Eigen/Dense>

#include <span>

namespace liesym {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// argmin ||y - F a||^2 + lambda ||a||^2.
///
/// Cholesky on F^T F + lambda I with one step of iterative refinement; falls
/// back to a complete orthogonal decomposition of the stacked system when the
/// factorization breaks down. lambda == 0 with rank-deficient F throws RankError.
Vector ridge_solve(const Matrix& F, const Vector& y, double lambda);

/// Same solve with a caller-supplied Gram matrix F^T F and right-hand side F^T y.
/// F is still needed for the refinement step and the fallback path.
Vector ridge_solve(const Matrix& F, const Matrix& gram, const Vector& Fty, const Vector& y,
                   double lambda);

/// |<r, v>| / (||r|| ||v||), or 0 when ||v|| < norm_floor.
/// Throws std::logic_error for a zero residual.
double cosine_score(std::span<const double> r, std::span<const double> v, double norm_floor);

/// Floor below which a candidate column scores 0: 1e-12 sqrt(L).
double default_norm_floor(std::size_t rows);

struct ResidualResult {
    Vector r;
    double mse = 0.0;
};

/// r = y - F a and mse = ||r||^2 / L.
ResidualResult residual(const Vector& y, const Matrix& F, const Vector& a);

/// ||y - F a||^2 + lambda ||a||^2.
double regularized_objective(const Vector& y, const Matrix& F, const Vector& a, double lambda);

/// ||F^T (F a - y) + lambda a||_inf / (1 + ||F^T y||_inf); < 1e-8 at a ridge optimum.
double stationarity_ratio(const Matrix& F, const Vector& y, const Vector& a, double lambda);

} // namespace liesym
