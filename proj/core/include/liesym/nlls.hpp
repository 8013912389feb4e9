#pragma once

#include "liesym/bases.hpp"
#include "liesym/geometry.hpp"
#include "liesym/linalg.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace liesym {

/// Residual vector r(theta) on a box lo <= theta <= hi.
class LeastSquaresProblem {
public:
    virtual ~LeastSquaresProblem() = default;

    virtual std::size_t dim() const = 0;
    virtual const Vector& lower() const = 0;
    virtual const Vector& upper() const = 0;

    virtual Vector residual(const Vector& theta) = 0;

    /// Called once before a batch of probe() calls around theta.
    virtual void begin_probes(const Vector& theta) { (void)theta; }

    /// residual at theta with component j replaced by value.
    virtual Vector probe(const Vector& theta, std::size_t j, double value) {
        Vector p = theta;
        p[static_cast<Eigen::Index>(j)] = value;
        return residual(p);
    }

    /// True when probe() may be called concurrently after begin_probes().
    virtual bool concurrent_probes() const { return false; }
};

struct TrustRegionConfig {
    int max_iterations = 4;        // accepted steps per call
    double fd_step = 1e-6;         // relative Jacobian step
    double initial_radius = 1.0;   // times ||D theta0|| (or absolute when that is 0)
    double expand = 2.0;
    double shrink = 0.25;
    double gradient_tol = 1e-12;   // on the scaled gradient, relative to 1 + cost
    double step_tol = 1e-12;       // relative step size
    int max_rejections = 8;        // consecutive rejected trial steps before giving up

    /// Throws ConfigError unless all knobs are positive and shrink < 1 < expand.
    void validate() const;
};

/// Moves theta strictly inside the box by margin * (hi - lo) where it sits on a bound.
Vector clamp_inward(const Vector& theta, const Vector& lo, const Vector& hi,
                    double margin = 1e-9);

/// Column j = (r(theta + h e_j) - r(theta - h e_j)) / 2h, h = fd_step max(1, |theta_j|).
/// Probes never leave the box: one-sided differences near a bound, shrunken
/// central differences when the box is narrower than 2h.
Matrix jacobian_fd(LeastSquaresProblem& problem, const Vector& theta, double fd_step);

struct TrustRegionResult {
    Vector theta;
    double initial_cost = 0.0; // 0.5 ||r||^2
    double cost = 0.0;
    int iterations = 0;        // accepted steps
    int evaluations = 0;       // residual evaluations, excluding Jacobian probes
    bool aborted = false;      // non-finite Jacobian or residual
    std::string message;
};

/// Bound-constrained Gauss-Newton trust region. Steps are dogleg steps in
/// Jacobian-column scaled variables; a step that leaves the box is reflected
/// off the violated bounds or truncated at them, whichever the linear model
/// prefers. Only strictly improving steps are accepted.
TrustRegionResult solve_bounded_least_squares(LeastSquaresProblem& problem, const Vector& theta0,
                                              const TrustRegionConfig& cfg);

/// Reduced objective r(theta) = y - F(theta) a*(theta) for an active set,
/// where a*(theta) is the ridge solution recomputed at every theta.
class VarProObjective : public LeastSquaresProblem {
public:
    /// row_weights (optional, one per row) scale the squared residual of each row.
    VarProObjective(const TrainingSet& rows, std::vector<BoundBase> active, double lambda,
                    std::vector<double> row_weights = {});

    std::size_t dim() const override { return static_cast<std::size_t>(lower_.size()); }
    const Vector& lower() const override { return lower_; }
    const Vector& upper() const override { return upper_; }

    Vector residual(const Vector& theta) override;
    void begin_probes(const Vector& theta) override;
    Vector probe(const Vector& theta, std::size_t j, double value) override;
    bool concurrent_probes() const override { return true; }

    Vector initial_theta() const;
    std::vector<BoundBase> bases_at(const Vector& theta) const;

    /// Weighted design matrix and targets at theta.
    Matrix design(const Vector& theta) const;
    const Vector& targets() const { return y_; }
    Vector amplitudes(const Vector& theta) const;
    double lambda() const { return lambda_; }
    std::size_t rows() const { return rows_->size(); }

private:
    void fill_column(std::size_t base, const Vector& theta, std::size_t j, double value,
                     Eigen::Ref<Vector> column) const;

    const TrainingSet* rows_;
    std::vector<BoundBase> active_;
    double lambda_;
    Vector sqrt_w_; // empty when unweighted
    Vector y_;
    Vector lower_;
    Vector upper_;
    std::vector<std::size_t> offset_; // first theta index of each base
    std::vector<std::size_t> owner_;  // base index of each theta component

    // State shared by probes around the last begin_probes() point.
    Matrix probe_F_;
    Matrix probe_gram_;
    Vector probe_Fty_;
};

struct RefineResult {
    std::vector<BoundBase> bases;
    Vector amplitudes;
    double initial_mse = 0.0;
    double mse = 0.0;
    int iterations = 0;
    bool warning = false;
    std::string message;
};

/// Jointly refines all nonlinear parameters of the objective's active set.
/// The returned MSE never exceeds the MSE at the starting parameters.
RefineResult refine(VarProObjective& objective, const TrustRegionConfig& cfg);

} // namespace liesym
