#include "liesym/nlls.hpp"

#include "liesym/errors.hpp"
#include "liesym/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liesym {

void TrustRegionConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("refine.nfev_global must be >= 1");
    if (!(fd_step > 0)) throw ConfigError("refine.fd_step must be positive");
    if (!(initial_radius > 0)) throw ConfigError("refine.initial_radius must be positive");
    if (!(shrink > 0 && shrink < 1)) throw ConfigError("refine.shrink must lie in (0, 1)");
    if (!(expand > 1)) throw ConfigError("refine.expand must exceed 1");
    if (!(gradient_tol > 0)) throw ConfigError("refine.gradient_tol must be positive");
    if (!(step_tol > 0)) throw ConfigError("refine.step_tol must be positive");
    if (max_rejections < 1) throw ConfigError("refine.max_rejections must be >= 1");
}

Vector clamp_inward(const Vector& theta, const Vector& lo, const Vector& hi, double margin) {
    Vector out = theta;
    for (Eigen::Index j = 0; j < out.size(); ++j) {
        const double eta = std::min(margin * (hi[j] - lo[j]), 0.5 * (hi[j] - lo[j]));
        out[j] = std::clamp(out[j], lo[j] + eta, hi[j] - eta);
    }
    return out;
}

Matrix jacobian_fd(LeastSquaresProblem& problem, const Vector& theta, double fd_step) {
    const auto n = static_cast<Eigen::Index>(problem.dim());
    const Vector& lo = problem.lower();
    const Vector& hi = problem.upper();

    problem.begin_probes(theta);
    Vector base; // r(theta), only needed for one-sided columns
    std::vector<Vector> columns(static_cast<std::size_t>(n));

    enum class Kind { Central, Forward, Backward };
    std::vector<Kind> kinds(static_cast<std::size_t>(n));
    std::vector<double> steps(static_cast<std::size_t>(n));
    bool need_base = false;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = fd_step * std::max(1.0, std::abs(theta[j]));
        const bool up = theta[j] + h <= hi[j];
        const bool down = theta[j] - h >= lo[j];
        auto& kind = kinds[static_cast<std::size_t>(j)];
        auto& step = steps[static_cast<std::size_t>(j)];
        if (up && down) {
            kind = Kind::Central;
            step = h;
        } else if (up) {
            kind = Kind::Forward;
            step = h;
            need_base = true;
        } else if (down) {
            kind = Kind::Backward;
            step = h;
            need_base = true;
        } else {
            kind = Kind::Central;
            step = 0.5 * std::min(hi[j] - theta[j], theta[j] - lo[j]);
        }
    }
    if (need_base) base = problem.residual(theta);

    auto column = [&](std::size_t jj) {
        const auto j = static_cast<Eigen::Index>(jj);
        const double h = steps[jj];
        if (!(h > 0)) {
            columns[jj] = Vector::Zero(base.size() > 0 ? base.size() : 0);
            return;
        }
        switch (kinds[jj]) {
        case Kind::Central:
            columns[jj] = (problem.probe(theta, jj, theta[j] + h) -
                           problem.probe(theta, jj, theta[j] - h)) /
                          (2.0 * h);
            break;
        case Kind::Forward:
            columns[jj] = (problem.probe(theta, jj, theta[j] + h) - base) / h;
            break;
        case Kind::Backward:
            columns[jj] = (base - problem.probe(theta, jj, theta[j] - h)) / h;
            break;
        }
    };
    if (problem.concurrent_probes()) {
        parallel_for(static_cast<std::size_t>(n), column);
    } else {
        for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) column(j);
    }

    Eigen::Index rows = 0;
    for (const auto& c : columns) rows = std::max(rows, c.size());
    Matrix J = Matrix::Zero(rows, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& c = columns[static_cast<std::size_t>(j)];
        if (c.size() == rows) J.col(j) = c;
    }
    return J;
}

namespace {

constexpr double kInwardMargin = 1e-9;

Vector reflect_into_box(const Vector& theta, const Vector& step, const Vector& lo,
                        const Vector& hi) {
    Vector out = theta + step;
    for (Eigen::Index j = 0; j < out.size(); ++j) {
        double v = out[j];
        if (v > hi[j]) v = hi[j] - (v - hi[j]);
        if (v < lo[j]) v = lo[j] + (lo[j] - v);
        if (v > hi[j] || v < lo[j]) {
            // Overshot the whole box: go halfway to the bound we crossed.
            v = 0.5 * (theta[j] + (step[j] > 0 ? hi[j] : lo[j]));
        }
        out[j] = v;
    }
    return clamp_inward(out, lo, hi, kInwardMargin);
}

Vector truncate_into_box(const Vector& theta, const Vector& step, const Vector& lo,
                         const Vector& hi) {
    double alpha = 1.0;
    for (Eigen::Index j = 0; j < step.size(); ++j) {
        if (step[j] > 0) alpha = std::min(alpha, (hi[j] - theta[j]) / step[j]);
        if (step[j] < 0) alpha = std::min(alpha, (lo[j] - theta[j]) / step[j]);
    }
    if (alpha < 1.0) alpha *= 0.995;
    return clamp_inward(theta + alpha * step, lo, hi, kInwardMargin);
}

double predicted_reduction(const Matrix& J, const Vector& g, const Vector& step) {
    return -(g.dot(step) + 0.5 * (J * step).squaredNorm());
}

} // namespace

TrustRegionResult solve_bounded_least_squares(LeastSquaresProblem& problem, const Vector& theta0,
                                              const TrustRegionConfig& cfg) {
    cfg.validate();
    const Vector& lo = problem.lower();
    const Vector& hi = problem.upper();

    TrustRegionResult out;
    out.theta = clamp_inward(theta0, lo, hi, kInwardMargin);
    Vector r = problem.residual(out.theta);
    ++out.evaluations;
    out.cost = out.initial_cost = 0.5 * r.squaredNorm();
    if (!std::isfinite(out.cost)) {
        out.aborted = true;
        out.message = "non-finite residual at the starting point";
        return out;
    }
    if (problem.dim() == 0) return out;

    Matrix J = jacobian_fd(problem, out.theta, cfg.fd_step);
    if (!J.allFinite()) {
        out.aborted = true;
        out.message = "non-finite Jacobian";
        return out;
    }
    Vector scale = J.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
        if (!(scale[j] > 0)) scale[j] = 1.0;
    }
    const double scaled_norm = (scale.array() * out.theta.array()).matrix().norm();
    double radius = cfg.initial_radius * (scaled_norm > 0 ? scaled_norm : 1.0);

    int rejections = 0;
    while (out.iterations < cfg.max_iterations) {
        const Vector g = J.transpose() * r;
        const Vector gs = g.array() / scale.array();
        if (gs.cwiseAbs().maxCoeff() <= cfg.gradient_tol * (1.0 + out.cost)) {
            out.message = "gradient tolerance reached";
            break;
        }
        const Matrix Js = J * scale.cwiseInverse().asDiagonal();
        const Vector z_gn = -Eigen::CompleteOrthogonalDecomposition<Matrix>(Js).solve(r);
        const double curvature = (Js * gs).squaredNorm();
        const Vector z_cauchy =
            curvature > 0 ? Vector(-(gs.squaredNorm() / curvature) * gs) : Vector(-gs);

        bool accepted = false;
        bool stalled = false;
        while (!accepted) {
            Vector z;
            if (z_gn.norm() <= radius) {
                z = z_gn;
            } else if (z_cauchy.norm() >= radius) {
                z = -(radius / gs.norm()) * gs;
            } else {
                // Dogleg: z_c + tau (z_gn - z_c) with ||z|| = radius.
                const Vector d = z_gn - z_cauchy;
                const double a = d.squaredNorm();
                const double b = 2.0 * z_cauchy.dot(d);
                const double c = z_cauchy.squaredNorm() - radius * radius;
                const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4 * a * c))) / (2 * a);
                z = z_cauchy + tau * d;
            }
            const Vector step = z.array() / scale.array();

            const Vector reflected = reflect_into_box(out.theta, step, lo, hi);
            const Vector truncated = truncate_into_box(out.theta, step, lo, hi);
            const double pred_reflected = predicted_reduction(J, g, reflected - out.theta);
            const double pred_truncated = predicted_reduction(J, g, truncated - out.theta);
            const Vector trial = pred_reflected >= pred_truncated ? reflected : truncated;
            const double predicted = std::max(pred_reflected, pred_truncated);
            const Vector taken = trial - out.theta;
            const double taken_norm = (scale.array() * taken.array()).matrix().norm();

            const Vector r_trial = problem.residual(trial);
            ++out.evaluations;
            const double cost_trial = 0.5 * r_trial.squaredNorm();
            const double actual = out.cost - cost_trial;
            const double rho = (predicted > 0 && std::isfinite(cost_trial)) ? actual / predicted
                                                                             : -1.0;
            if (rho < 0.25) {
                radius = cfg.shrink * std::min(radius, std::max(taken_norm, 1e-300));
            } else if (rho > 0.75 && taken_norm >= 0.95 * radius) {
                radius *= cfg.expand;
            }

            if (std::isfinite(cost_trial) && actual > 0) {
                accepted = true;
                rejections = 0;
                out.theta = trial;
                out.cost = cost_trial;
                r = r_trial;
                ++out.iterations;
                if (taken.norm() <= cfg.step_tol * (cfg.step_tol + out.theta.norm())) {
                    out.message = "step tolerance reached";
                    stalled = true;
                }
            } else if (++rejections >= cfg.max_rejections || radius < 1e-300) {
                out.message = "no improving step found";
                stalled = true;
                break;
            }
        }
        if (stalled || out.iterations >= cfg.max_iterations) break;

        J = jacobian_fd(problem, out.theta, cfg.fd_step);
        if (!J.allFinite()) {
            out.message = "non-finite Jacobian; stopped at last accepted point";
            break;
        }
        for (Eigen::Index j = 0; j < scale.size(); ++j) {
            scale[j] = std::max(scale[j], J.col(j).norm());
        }
    }
    if (out.message.empty()) out.message = "iteration limit reached";
    return out;
}

// ---------------------------------------------------------------------------

VarProObjective::VarProObjective(const TrainingSet& rows, std::vector<BoundBase> active,
                                 double lambda, std::vector<double> row_weights)
    : rows_(&rows), active_(std::move(active)), lambda_(lambda) {
    const auto L = static_cast<Eigen::Index>(rows.size());
    y_ = Eigen::Map<const Vector>(rows.targets.data(), L);
    if (!row_weights.empty()) {
        if (row_weights.size() != rows.size()) {
            throw ConfigError("row weights must match the number of training rows");
        }
        sqrt_w_.resize(L);
        for (Eigen::Index i = 0; i < L; ++i) {
            sqrt_w_[i] = std::sqrt(row_weights[static_cast<std::size_t>(i)]);
        }
        y_ = y_.cwiseProduct(sqrt_w_);
    }

    std::size_t n = 0;
    for (const auto& b : active_) {
        offset_.push_back(n);
        n += b.family->param_count();
    }
    lower_.resize(static_cast<Eigen::Index>(n));
    upper_.resize(static_cast<Eigen::Index>(n));
    owner_.resize(n);
    for (std::size_t i = 0; i < active_.size(); ++i) {
        const auto& fam = *active_[i].family;
        for (std::size_t k = 0; k < fam.param_count(); ++k) {
            const auto j = static_cast<Eigen::Index>(offset_[i] + k);
            lower_[j] = fam.params[k].bounds.lo;
            upper_[j] = fam.params[k].bounds.hi;
            owner_[offset_[i] + k] = i;
        }
    }
}

Vector VarProObjective::initial_theta() const {
    Vector theta(lower_.size());
    for (std::size_t i = 0; i < active_.size(); ++i) {
        for (std::size_t k = 0; k < active_[i].params.size(); ++k) {
            theta[static_cast<Eigen::Index>(offset_[i] + k)] = active_[i].params[k];
        }
    }
    return theta;
}

std::vector<BoundBase> VarProObjective::bases_at(const Vector& theta) const {
    std::vector<BoundBase> out = active_;
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t k = 0; k < out[i].params.size(); ++k) {
            out[i].params[k] = theta[static_cast<Eigen::Index>(offset_[i] + k)];
        }
    }
    return out;
}

void VarProObjective::fill_column(std::size_t base, const Vector& theta, std::size_t j,
                                  double value, Eigen::Ref<Vector> column) const {
    const auto& fam = *active_[base].family;
    std::vector<double> params(fam.param_count());
    for (std::size_t k = 0; k < params.size(); ++k) {
        const std::size_t idx = offset_[base] + k;
        params[k] = idx == j ? value : theta[static_cast<Eigen::Index>(idx)];
    }
    eval_family_rows(fam, params, *rows_, std::span<double>(column.data(), rows_->size()));
    if (sqrt_w_.size() > 0) column.array() *= sqrt_w_.array();
}

Matrix VarProObjective::design(const Vector& theta) const {
    Matrix F(static_cast<Eigen::Index>(rows_->size()), static_cast<Eigen::Index>(active_.size()));
    const std::size_t none = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < active_.size(); ++i) {
        fill_column(i, theta, none, 0.0, F.col(static_cast<Eigen::Index>(i)));
    }
    return F;
}

Vector VarProObjective::amplitudes(const Vector& theta) const {
    return ridge_solve(design(theta), y_, lambda_);
}

Vector VarProObjective::residual(const Vector& theta) {
    const Matrix F = design(theta);
    const Vector a = ridge_solve(F, y_, lambda_);
    return y_ - F * a;
}

void VarProObjective::begin_probes(const Vector& theta) {
    probe_F_ = design(theta);
    probe_gram_ = probe_F_.transpose() * probe_F_;
    probe_Fty_ = probe_F_.transpose() * y_;
}

Vector VarProObjective::probe(const Vector& theta, std::size_t j, double value) {
    // Only column owner_[j] changes; its Gram row/column and F^T y entry are
    // recomputed exactly and the amplitudes re-solved from a fresh factorization.
    const std::size_t i = owner_[j];
    const auto ii = static_cast<Eigen::Index>(i);
    Matrix F = probe_F_;
    fill_column(i, theta, j, value, F.col(ii));
    Matrix gram = probe_gram_;
    const Vector cross = F.transpose() * F.col(ii);
    gram.col(ii) = cross;
    gram.row(ii) = cross.transpose();
    Vector Fty = probe_Fty_;
    Fty[ii] = F.col(ii).dot(y_);
    const Vector a = ridge_solve(F, gram, Fty, y_, lambda_);
    return y_ - F * a;
}

RefineResult refine(VarProObjective& objective, const TrustRegionConfig& cfg) {
    const Vector theta0 = objective.initial_theta();
    const double L = static_cast<double>(objective.rows());

    RefineResult out;
    const Vector r0 = objective.residual(theta0);
    out.initial_mse = r0.squaredNorm() / L;

    const TrustRegionResult tr = solve_bounded_least_squares(objective, theta0, cfg);
    out.iterations = tr.iterations;
    out.message = tr.message;
    out.warning = tr.aborted;

    Vector theta = tr.theta;
    double mse = 2.0 * tr.cost / L;
    if (tr.aborted || !(mse <= out.initial_mse)) {
        // Inward clamping alone can nudge the loss up; keep the start instead.
        theta = theta0;
        mse = out.initial_mse;
    }
    out.bases = objective.bases_at(theta);
    out.amplitudes = objective.amplitudes(theta);
    out.mse = mse;
    return out;
}

} // namespace liesym
