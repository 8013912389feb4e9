#include "liesym/linalg.hpp"

#include "liesym/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace liesym {

namespace {

Vector orthogonal_fallback(const Matrix& F, const Vector& y, double lambda) {
    const Eigen::Index m = F.cols();
    if (lambda == 0.0) {
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(F);
        if (cod.rank() < m) {
            throw RankError("normal matrix is singular (rank " + std::to_string(cod.rank()) +
                            " < " + std::to_string(m) + ") and lambda = 0");
        }
        return cod.solve(y);
    }
    Matrix stacked(F.rows() + m, m);
    stacked.topRows(F.rows()) = F;
    stacked.bottomRows(m) = std::sqrt(lambda) * Matrix::Identity(m, m);
    Vector rhs = Vector::Zero(F.rows() + m);
    rhs.head(F.rows()) = y;
    return Eigen::CompleteOrthogonalDecomposition<Matrix>(stacked).solve(rhs);
}

} // namespace

Vector ridge_solve(const Matrix& F, const Vector& y, double lambda) {
    const Matrix gram = F.transpose() * F;
    const Vector Fty = F.transpose() * y;
    return ridge_solve(F, gram, Fty, y, lambda);
}

Vector ridge_solve(const Matrix& F, const Matrix& gram, const Vector& Fty, const Vector& y,
                   double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda)) throw ConfigError("ridge lambda must be >= 0");
    if (F.rows() != y.size()) throw ConfigError("ridge_solve: F and y have different row counts");
    const Eigen::Index m = F.cols();
    if (m == 0) return Vector();

    Matrix normal = gram;
    normal.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(normal);
    bool ok = llt.info() == Eigen::Success;
    Vector a;
    if (ok) {
        a = llt.solve(Fty);
        // Refinement against the unformed normal equations recovers the
        // accuracy lost to squaring the condition number.
        const Vector defect = F.transpose() * (y - F * a) - lambda * a;
        a += llt.solve(defect);
        ok = a.allFinite();
        if (ok && lambda == 0.0) {
            // Cholesky can succeed on a numerically singular Gram matrix.
            const double dmin = llt.matrixLLT().diagonal().minCoeff();
            const double dmax = llt.matrixLLT().diagonal().maxCoeff();
            ok = dmin > 1e-7 * dmax;
        }
    }
    if (!ok) a = orthogonal_fallback(F, y, lambda);
    return a;
}

double default_norm_floor(std::size_t rows) {
    return 1e-12 * std::sqrt(static_cast<double>(rows));
}

double cosine_score(std::span<const double> r, std::span<const double> v, double norm_floor) {
    if (r.size() != v.size()) throw std::invalid_argument("cosine_score: size mismatch");
    double rr = 0.0;
    double vv = 0.0;
    double rv = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        rr += r[i] * r[i];
        vv += v[i] * v[i];
        rv += r[i] * v[i];
    }
    if (!(rr > 0.0)) throw std::logic_error("cosine_score: residual is zero");
    const double vn = std::sqrt(vv);
    if (!(vn >= norm_floor) || !std::isfinite(vn)) return 0.0;
    return std::min(1.0, std::abs(rv) / (std::sqrt(rr) * vn));
}

ResidualResult residual(const Vector& y, const Matrix& F, const Vector& a) {
    ResidualResult out;
    out.r = F.cols() == 0 ? y : Vector(y - F * a);
    out.mse = y.size() == 0 ? 0.0 : out.r.squaredNorm() / static_cast<double>(y.size());
    return out;
}

double regularized_objective(const Vector& y, const Matrix& F, const Vector& a, double lambda) {
    const Vector r = F.cols() == 0 ? y : Vector(y - F * a);
    return r.squaredNorm() + lambda * a.squaredNorm();
}

double stationarity_ratio(const Matrix& F, const Vector& y, const Vector& a, double lambda) {
    if (F.cols() == 0) return 0.0;
    const Vector g = F.transpose() * (F * a - y) + lambda * a;
    const double scale = 1.0 + (F.transpose() * y).cwiseAbs().maxCoeff();
    return g.cwiseAbs().maxCoeff() / scale;
}

} // namespace liesym
