#include "mxgs/continuation.hpp"

#include "mxgs/error.hpp"
#include "mxgs/fourier.hpp"
#include "mxgs/inner.hpp"
#include "mxgs/linear_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace mxgs {

namespace {

Eigen::VectorXd f_of(const Eigen::VectorXd& u, double p) {
    if (p == 2.0) return u.array().cube().matrix();
    return u.unaryExpr([p](double x) { return std::pow(std::abs(x), p) * x; });
}

Eigen::VectorXd fprime_of(const Eigen::VectorXd& u, double p) {
    return u.unaryExpr([p](double x) { return (p + 1.0) * std::pow(std::abs(x), p); });
}

}  // namespace

ContinuationStep continuation_step(const GroundStateResult& anchor, double s_target, const ContinuationConfig& config) {
    SymbolParams params = anchor.params;
    params.s = s_target;
    validate(params);
    const GridSpec& grid = anchor.field.grid;
    const double p = params.p;
    const double dV = grid.cell_volume();

    ContinuationStep step;
    step.result = anchor;
    step.result.params = params;
    step.result.method = "continuation";
    step.result.log.clear();
    if (s_target == anchor.s()) {
        step.accepted = true;
        step.result.iterations = 0;
        finalize_result(step.result);
        return step;
    }

    const auto A = operator_multiplier(grid, params);
    const auto Ainv = A.reciprocal();
    const Eigen::VectorXd& u = anchor.field.values;
    const Eigen::VectorXd fu = f_of(u, p);
    const Eigen::VectorXd dfu = fprime_of(u, p);
    const Eigen::VectorXd R0 = A.apply(u) - fu;
    auto sym = [&](const Eigen::VectorXd& v) { return symmetrize(RealField(grid, v)).values; };
    auto J = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(A.apply(v) - dfu.cwiseProduct(v)); };
    auto prec = [&](const Eigen::VectorXd& v) { return Ainv.apply(v); };
    auto norm_s = [&](const Eigen::VectorXd& v) { return std::sqrt(std::max(dV * v.dot(A.apply(v)), 0.0)); };
    const double scale = norm_s(u);

    Eigen::VectorXd w = Eigen::VectorXd::Zero(u.size());
    double prev_diff = -1.0;
    bool converged = false;
    for (int k = 0; k < config.max_picard; ++k) {
        const Eigen::VectorXd N2 = f_of(u + w, p) - fu - dfu.cwiseProduct(w);
        const Eigen::VectorXd rhs = sym(N2 - R0);
        const auto sol = minres(J, prec, rhs, config.inner_tol, config.inner_max_iterations, sym);
        step.inner_iterations += sol.iterations;
        if (!sol.converged) throw ComputeError("continuation inner solve did not converge (relative residual " +
                                               std::to_string(sol.relative_residual) + ")");
        const double diff = norm_s(sol.x - w);
        w = sol.x;
        step.picard_iterations = k + 1;
        if (!std::isfinite(diff)) break;
        // Ratios below the rounding floor carry no information about the map.
        if (prev_diff > 0.0 && prev_diff > 1e3 * config.picard_tol * scale)
            step.contraction_estimate = std::max(step.contraction_estimate, diff / prev_diff);
        prev_diff = diff;
        if (step.contraction_estimate >= 1.0) break;
        if (diff <= config.picard_tol * scale) {
            converged = true;
            break;
        }
    }
    step.norm_w = norm_s(w);
    if (step.contraction_estimate >= 1.0) {
        step.rejection = "contraction estimate " + std::to_string(step.contraction_estimate) + " >= 1";
        return step;
    }
    if (!converged) {
        step.rejection = "Picard iteration did not converge";
        return step;
    }
    step.result.field = RealField(grid, u + w);
    step.result.iterations = step.picard_iterations;
    finalize_result(step.result);
    const double rel = step.result.residual_linf / step.result.field.max_abs();
    if (!(rel <= config.residual_tol)) {
        step.rejection = "Euler-Lagrange residual " + std::to_string(rel) + " above tolerance";
        return step;
    }
    step.result.converged = true;
    step.accepted = true;
    return step;
}

std::vector<ContinuationStep> advance(const GroundStateResult& anchor, double s_target, const ContinuationConfig& config) {
    std::vector<ContinuationStep> steps;
    auto current = [&]() -> const GroundStateResult& { return steps.empty() ? anchor : steps.back().result; };
    double h = s_target - anchor.s();
    while (current().s() != s_target) {
        const double remaining = s_target - current().s();
        if (std::abs(h) >= std::abs(remaining)) h = remaining;
        const double next = h == remaining ? s_target : current().s() + h;
        auto st = continuation_step(current(), next, config);
        if (st.accepted) {
            steps.push_back(std::move(st));
        } else {
            h *= 0.5;
            if (std::abs(h) < config.min_step)
                throw ComputeError("continuation step fell below the minimum size: " + st.rejection);
        }
    }
    return steps;
}

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers; results are indexed, so order is deterministic.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

ContinuationTrace sweep_s(const std::vector<double>& s_values, const SymbolParams& params, const GridSpec& grid,
                          const ContinuationConfig& config) {
    if (s_values.empty()) throw InvalidArgument("sweep needs at least one s value");
    for (double s : s_values) validate(SymbolParams{params.n, s, params.p, params.shift});
    int direction = 0;
    if (s_values.size() > 1) {
        direction = s_values[1] > s_values[0] ? 1 : -1;
        for (std::size_t i = 1; i < s_values.size(); ++i)
            if ((s_values[i] - s_values[i - 1]) * direction <= 0.0) throw InvalidArgument("s values must be strictly monotone");
    }

    ContinuationTrace trace;
    trace.direction = direction;
    auto at = [&](double s) {
        SymbolParams q = params;
        q.s = s;
        return q;
    };

    // Independent solves: anchor, every k-th node, and the endpoint.
    std::vector<std::size_t> scratch_nodes;
    for (std::size_t i = 1; i < s_values.size(); ++i)
        if (config.scratch_every > 0 && i % static_cast<std::size_t>(config.scratch_every) == 0) scratch_nodes.push_back(i);
    std::vector<double> solve_s{s_values[0]};
    for (auto i : scratch_nodes) solve_s.push_back(s_values[i]);
    const bool want_endpoint = config.endpoint_distances && direction != 0;
    if (want_endpoint) solve_s.push_back(direction < 0 ? 0.0 : 1.0);
    std::vector<std::optional<GroundStateResult>> solved(solve_s.size());
    std::vector<std::string> solve_errors(solve_s.size());
    parallel_for(solve_s.size(), config.threads, [&](std::size_t i) {
        try {
            auto r = solve_ground_state(at(solve_s[i]), grid, std::nullopt, config.solver);
            if (r.converged) {
                solved[i] = std::move(r);
            } else {
                solve_errors[i] = "independent solve at s = " + std::to_string(solve_s[i]) + " did not converge";
            }
        } catch (const std::exception& e) {
            solve_errors[i] = e.what();
        }
    });
    if (!solved[0]) {
        trace.failed = true;
        trace.failure = "anchor: " + solve_errors[0];
        return trace;
    }
    trace.anchor = *solved[0];
    if (want_endpoint && solved.back()) trace.endpoint = *solved.back();

    auto add_record = [&](ContinuationRecord rec) {
        if (trace.endpoint) {
            rec.endpoint_h1 = h1_distance(rec.result.field, trace.endpoint->field);
        }
        trace.records.push_back(std::move(rec));
    };
    {
        ContinuationRecord rec;
        rec.s = s_values[0];
        rec.lambda_s = trace.anchor.lambda_s;
        rec.result = trace.anchor;
        add_record(std::move(rec));
    }
    for (std::size_t i = 1; i < s_values.size(); ++i) {
        try {
            auto steps = advance(trace.records.back().result, s_values[i], config);
            ContinuationRecord rec;
            rec.s = s_values[i];
            rec.substeps = static_cast<int>(steps.size());
            for (const auto& st : steps) {
                rec.norm_w += st.norm_w;
                rec.contraction_estimate = std::max(rec.contraction_estimate, st.contraction_estimate);
            }
            rec.result = std::move(steps.back().result);
            rec.lambda_s = rec.result.lambda_s;
            const auto it = std::find(scratch_nodes.begin(), scratch_nodes.end(), i);
            if (it != scratch_nodes.end()) {
                const auto& sc = solved[1 + static_cast<std::size_t>(it - scratch_nodes.begin())];
                if (!sc) throw ComputeError(solve_errors[1 + static_cast<std::size_t>(it - scratch_nodes.begin())]);
                rec.scratch_h1 = h1_distance(rec.result.field, sc->field);
                rec.scratch_lambda = sc->lambda_s;
            }
            add_record(std::move(rec));
        } catch (const std::exception& e) {
            trace.failed = true;
            trace.failure = "s = " + std::to_string(s_values[i]) + ": " + e.what();
            break;
        }
    }
    return trace;
}

}  // namespace mxgs
