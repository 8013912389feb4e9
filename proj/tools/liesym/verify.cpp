#include "app.hpp"

#include <liesym/errors.hpp>
#include <liesym/parallel.hpp>
#include <liesym/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

namespace liesym::app {

namespace {

struct TransformCase {
    TransformId id;
    SeedId seed;
    ParamBounds range; // parameters exercised by the checks
};

const std::vector<TransformCase>& transform_cases() {
    static const std::vector<TransformCase> cases = {
        {TransformId::HeatT1, SeedId::HeatSineDecay, {-1.0, 1.0}},
        {TransformId::HeatT2, SeedId::HeatSineDecay, {-0.05, 0.05}},
        {TransformId::HeatT3, SeedId::HeatSineDecay, {-1.0, 1.0}},
        {TransformId::HeatT4, SeedId::HeatSineDecay, {-1.0, 1.0}},
        {TransformId::HeatT5, SeedId::HeatSineDecay, {-1.0, 1.0}},
        {TransformId::HeatT6, SeedId::HeatSineDecay, {0.0, 2.0}},
        {TransformId::WaveT1, SeedId::WaveBlobPair, {-1.0, 1.0}},
        {TransformId::WaveT2, SeedId::WaveStanding, {-1.0, 1.0}},
    };
    return cases;
}

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string params_text(std::span<const double> p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ", ";
        s += format_double(p[i]);
    }
    return s + ")";
}

std::vector<Point> random_points(const Domain& d, Rng& rng, std::size_t n) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back({rng.uniform(d.x_min, d.x_max), rng.uniform(d.t_min, d.t_max)});
    }
    return pts;
}

void transform_checks(const TransformCase& tc, Rng& rng, std::vector<CheckResult>& out) {
    const PdeKind pde = pde_of(tc.id);
    const Domain domain = Domain::default_for(pde);
    const LieTransform transform = LieTransform::make(tc.id, domain);
    const SolutionFn seed = seed_function(tc.seed);
    const std::string prefix = std::string(to_string(tc.id)) + "/";
    const auto pts = random_points(domain, rng, 25);

    {
        const SolutionFn same = apply_transform(transform, seed, 0.0);
        double worst = 0.0;
        for (const auto& p : pts) worst = std::max(worst, std::abs(same(p.x, p.t).v - seed(p.x, p.t).v));
        out.push_back({prefix + "identity", worst <= 1e-14, fmt("max |T_0 f - f| = %.3g", worst)});
    }
    {
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const double a = rng.uniform(tc.range.lo, tc.range.hi) / 2;
            const double b = rng.uniform(tc.range.lo, tc.range.hi) / 2;
            const SolutionFn ab = apply_transform(transform, apply_transform(transform, seed, b), a);
            const SolutionFn sum = apply_transform(transform, seed, a + b);
            for (const auto& p : pts) {
                const double u = sum(p.x, p.t).v;
                worst = std::max(worst, std::abs(ab(p.x, p.t).v - u) / (1.0 + std::abs(u)));
            }
        }
        out.push_back({prefix + "group_law", worst <= 1e-10,
                       fmt("max rel |T_a T_b f - T_(a+b) f| = %.3g", worst)});
    }
    {
        const auto grid = interior_grid(domain, 20, 20);
        double worst = 0.0;
        std::string where;
        for (int k = 0; k < 5; ++k) {
            const double theta = rng.uniform(tc.range.lo, tc.range.hi);
            const SolutionFn g = apply_transform(transform, seed, theta);
            const double r = pde_residual(pde, [&](double x, double t) { return g(x, t).v; }, grid,
                                          FdOptions::high_order(pde));
            if (!(r <= worst)) {
                worst = r;
                where = format_double(theta);
            }
        }
        out.push_back({prefix + "pde_residual", worst < 1e-5,
                       fmt("max FD residual %.3g", worst) + " at theta=" + where});
    }
    {
        double worst = 0.0;
        const double h = 1e-5;
        for (int k = 0; k < 5; ++k) {
            const SolutionFn g = apply_transform(transform, seed, rng.uniform(tc.range.lo, tc.range.hi));
            for (const auto& p : pts) {
                const Jet u = g(p.x, p.t);
                const double dx = (g(p.x + h, p.t).v - g(p.x - h, p.t).v) / (2 * h);
                const double dt = (g(p.x, p.t + h).v - g(p.x, p.t - h).v) / (2 * h);
                worst = std::max({worst, std::abs(u.dx - dx) / (1.0 + std::abs(dx)),
                                  std::abs(u.dt - dt) / (1.0 + std::abs(dt))});
            }
        }
        out.push_back({prefix + "derivatives", worst < 1e-6,
                       fmt("max rel |analytic - FD| partial = %.3g", worst)});
    }
}

void family_checks(const BaseFamily& family, const VerifyOptions& opts, Rng& rng,
                   std::vector<CheckResult>& out) {
    const Domain domain = Domain::default_for(family.pde);
    const std::string prefix = family.id + "/";
    const auto draws = sample_params(family, opts.draws_per_family, rng);
    const auto grid = interior_grid(domain, opts.grid, opts.grid);
    const FdOptions fd = FdOptions::high_order(family.pde);

    std::vector<double> residuals(draws.size(), 0.0);
    std::vector<std::string> errors(draws.size());
    parallel_for(draws.size(), [&](std::size_t k) {
        try {
            const TransformChain chain = family.bind(draws[k]);
            residuals[k] = pde_residual(
                family.pde, [&](double x, double t) { return eval_chain_value(chain, x, t); }, grid, fd);
        } catch (const Error& e) {
            residuals[k] = std::numeric_limits<double>::infinity();
            errors[k] = e.what();
        }
    });
    std::size_t worst = 0;
    for (std::size_t k = 1; k < draws.size(); ++k) {
        if (!(residuals[k] <= residuals[worst])) worst = k;
    }
    const bool ok = residuals[worst] < 1e-5;
    std::string detail = fmt("max FD residual %.3g over ", residuals[worst]) +
                         std::to_string(draws.size()) + " draws";
    if (!ok) {
        detail += "; offending (" + family.id + ", theta=" + params_text(draws[worst]) + ")";
        if (!errors[worst].empty()) detail += ": " + errors[worst];
    }
    out.push_back({prefix + "pde_residual", ok, detail});

    const auto pts = random_points(domain, rng, 40);
    std::vector<double> xs, ts;
    for (const auto& p : pts) {
        xs.push_back(p.x);
        ts.push_back(p.t);
    }
    double batch_err = 0.0, dt_err = 0.0;
    std::string failure;
    for (std::size_t k = 0; k < std::min<std::size_t>(draws.size(), 10); ++k) {
        try {
            const TransformChain chain = family.bind(draws[k]);
            const auto values = eval_family_batch(family, draws[k], xs, ts, EvalKind::Value);
            const auto dts = eval_family_batch(family, draws[k], xs, ts, EvalKind::DtValue);
            for (std::size_t i = 0; i < xs.size(); ++i) {
                batch_err = std::max(batch_err, std::abs(values[i] - eval_chain_value(chain, xs[i], ts[i])));
                const double h = 1e-6 * std::max(1.0, domain.duration());
                const double fd_dt = (eval_chain_value(chain, xs[i], ts[i] + h) -
                                      eval_chain_value(chain, xs[i], ts[i] - h)) /
                                     (2 * h);
                dt_err = std::max(dt_err, std::abs(dts[i] - fd_dt) / std::max(1.0, std::abs(fd_dt)));
            }
        } catch (const Error& e) {
            failure = "(" + family.id + ", theta=" + params_text(draws[k]) + "): " + e.what();
            break;
        }
    }
    out.push_back({prefix + "batch_matches_chain", failure.empty() && batch_err == 0.0,
                   failure.empty() ? fmt("max |batch - chain| = %.3g", batch_err) : failure});
    out.push_back({prefix + "dt_matches_fd", failure.empty() && dt_err < 1e-5,
                   failure.empty() ? fmt("max rel |dt - FD| = %.3g", dt_err) : failure});
}

} // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
    Rng rng(opts.seed);
    std::vector<CheckResult> out;
    for (const auto& tc : transform_cases()) transform_checks(tc, rng, out);
    for (PdeKind pde : {PdeKind::Heat, PdeKind::Wave}) {
        const Domain domain = Domain::default_for(pde);
        for (const auto& family : default_catalog(pde, domain)) {
            if (opts.inject_singular_t6 && family->id == "gaussian_blob") {
                BaseFamily broken = *family;
                auto& sharp = broken.params[broken.param_index("sharpness")];
                const double singular = -1.0 / (4.0 * domain.t_max);
                sharp.bounds = {20.0 * singular, 2.0 * singular};
                sharp.rule = SamplingRule::Uniform;
                family_checks(broken, opts, rng, out);
                continue;
            }
            family_checks(*family, opts, rng, out);
        }
    }
    return out;
}

} // namespace liesym::app
