#include "fca/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "fca/error.hpp"
#include "fca/random.hpp"

namespace fca {

namespace {

constexpr std::size_t kRunCertificationSamples = 8;

// Q_k with R_k b precomputed; the iteration only ever needs T_k x + (R_k b).
struct PreparedOperators {
    std::vector<Matrix> t;
    std::vector<Vector> rb;

    PreparedOperators(const OperatorSchedule& q, const Vector& b) {
        for (const auto& op : q.prefix()) {
            t.push_back(op.t);
            rb.push_back(op.r * b);
        }
        t.push_back(q.terminal().t);
        rb.push_back(q.terminal().r * b);
    }

    std::size_t prefix_size() const { return t.size() - 1; }

    // Operator paired with family member j: Q_{j-1}, with member 0 using Q_0.
    Vector apply(std::size_t j, const Vector& x) const {
        const std::size_t k = j == 0 ? 0 : std::min(j - 1, t.size() - 1);
        return t[k] * x + rb[k];
    }
};

void certify_schedule(const OperatorSchedule& q, const LlsInstance& instance) {
    auto check = [&](const AffineOperator& op) {
        const auto rep = validate_properties(op, instance.a(), instance.projectors(),
                                             kRunCertificationSamples);
        if (!rep.passed()) {
            throw PreconditionError("run_fca: operator " + op.label +
                                    " does not satisfy the required properties");
        }
    };
    for (const auto& op : q.prefix()) check(op);
    check(q.terminal());
}

RunMonitors instance_monitors(const LlsInstance& instance, const Vector& delta,
                              bool residual_stop) {
    RunMonitors mon;
    auto inst = std::make_shared<const LlsInstance>(instance);
    mon.residual = [inst](const Vector& x) { return norm2(inst->a() * x - inst->b()); };
    if (residual_stop) {
        const double scale = 1.0 + norm2(instance.b());
        mon.stop_residual = [inst, delta, scale](const Vector& x) {
            return inst->lss_residual(x - delta) / scale;
        };
    }
    return mon;
}

// Delta of the terminal operator; a shift only matters once the terminal
// member is active, which is when the residual stop is checked.
Vector terminal_delta(const OperatorSchedule& q, const LlsInstance& instance) {
    return compute_delta(q.terminal(), instance).delta;
}

}  // namespace

std::string to_string(RunStatus s) {
    return s == RunStatus::converged ? "converged" : "max_iter";
}

RunTrace run_family_iteration(const OperatorFamily& family, const Vector& x0,
                              const SolverConfig& config, const RunMonitors& monitors) {
    if (config.max_iter == 0) throw PreconditionError("run: max_iter must be at least 1");
    if (!(config.step_tol > 0.0) || !(config.residual_tol > 0.0)) {
        throw PreconditionError("run: tolerances must be positive");
    }
    if (!all_finite(x0)) throw PreconditionError("run: starting point must be finite");
    const std::size_t stride = std::max<std::size_t>(config.stride, 1);

    const Vector* z = config.reference_point ? &*config.reference_point : nullptr;
    const bool fejer = z != nullptr && config.monitor_fejer;
    if (z && z->size() != x0.size()) throw DimensionError("run: reference point dimension");

    RunTrace trace;
    trace.rows.reserve(std::min<std::size_t>(config.max_iter, 1u << 20) + 1);

    auto record = [&](std::size_t k, const Vector& x) {
        TraceRow row;
        row.k = k;
        if (monitors.residual) row.residual = monitors.residual(x);
        if (fejer) row.fejer_distance = norm2(x - *z);
        trace.rows.push_back(row);
    };

    Vector x = x0;
    record(0, x);
    trace.iterates.push_back({0, x});

    for (std::size_t k = 0; k < config.max_iter; ++k) {
        const std::size_t j = k + 1;
        Vector next = family.apply(j, x);
        if (!all_finite(next)) {
            throw DivergenceError("run: iterate " + std::to_string(j) + " is not finite", j);
        }
        const double step = norm_inf(next - x);

        std::optional<double> cond1;
        if (z && !monitors.probes.empty()) {
            const double lhs = norm2(next - *z);
            for (const auto& p : monitors.probes) {
                if (p.l >= family.terminal_index || k < p.k_min) continue;
                const double d = lhs - norm2(family.apply(p.l, x) - *z);
                cond1 = cond1 ? std::max(*cond1, d) : d;
            }
        }

        x = std::move(next);
        record(j, x);
        TraceRow& row = trace.rows.back();
        row.step_norm = step;
        row.condition1_defect = cond1;
        if (family.box_index) row.box_index = family.box_index(j);
        if (j % stride == 0) trace.iterates.push_back({j, x});
        trace.iterations = j;

        if (j >= family.terminal_index) {
            const bool small_step = step <= config.step_tol;
            const bool small_residual =
                monitors.stop_residual && monitors.stop_residual(x) <= config.residual_tol;
            if (small_step || small_residual) {
                trace.status = RunStatus::converged;
                break;
            }
        }
    }
    if (trace.iterates.back().k != trace.iterations) trace.iterates.push_back({trace.iterations, x});
    trace.final_iterate = std::move(x);
    return trace;
}

OperatorFamily plain_family(const OperatorSchedule& q, const Vector& b) {
    auto ops = std::make_shared<const PreparedOperators>(q, b);
    OperatorFamily f;
    f.apply = [ops](std::size_t j, const Vector& x) { return ops->apply(j, x); };
    f.terminal_index = ops->prefix_size() + 1;
    return f;
}

OperatorFamily box_family(const OperatorSchedule& q, const Vector& b, const BoxSchedule& boxes) {
    if (boxes.dim() != q.terminal().dim()) {
        throw DimensionError("box_family: box dimension does not match the operator");
    }
    auto ops = std::make_shared<const PreparedOperators>(q, b);
    auto sched = std::make_shared<const BoxSchedule>(boxes);
    OperatorFamily f;
    f.apply = [ops, sched](std::size_t j, const Vector& x) {
        return box_project(sched->at(j), ops->apply(j, x));
    };
    f.terminal_index = std::max(ops->prefix_size() + 1, sched->terminal_index());
    f.box_index = [sched](std::size_t j) { return std::min(j, sched->terminal_index()); };
    return f;
}

OperatorFamily smoothing_family(const OperatorSchedule& q, const Vector& b,
                                const SmoothingMatrix& s) {
    if (s.dim() != q.terminal().dim()) {
        throw DimensionError("smoothing_family: smoothing dimension does not match the operator");
    }
    auto ops = std::make_shared<const PreparedOperators>(q, b);
    auto sm = std::make_shared<const SmoothingMatrix>(s);
    OperatorFamily f;
    f.apply = [ops, sm](std::size_t j, const Vector& x) { return sm->apply(ops->apply(j, x)); };
    f.terminal_index = ops->prefix_size() + 1;
    return f;
}

std::vector<Condition1Probe> condition1_probes(const BoxSchedule& boxes,
                                               const std::vector<std::size_t>& ls) {
    const auto nest = verify_nesting(boxes);
    std::vector<Condition1Probe> out;
    for (std::size_t l : ls) {
        if (l >= boxes.terminal_index()) {
            out.push_back({l, l});
            continue;
        }
        const auto& w = nest.witnesses[l];
        if (!w.k) {
            throw PreconditionError("condition1_probes: box " + std::to_string(l) +
                                    " does not contain the terminal box");
        }
        out.push_back({l, *w.k});
    }
    return out;
}

RunTrace run_fca(const OperatorSchedule& q, const LlsInstance& instance, const BoxSchedule& boxes,
                 const Vector& x0, const SolverConfig& config) {
    certify_schedule(q, instance);
    const auto nest = verify_nesting(boxes);
    if (!nest.passed()) {
        throw PreconditionError("run_fca: box schedule is not nested at index " +
                                std::to_string(*nest.first_violation));
    }
    auto mon = instance_monitors(instance, terminal_delta(q, instance), true);
    if (config.reference_point) mon.probes = condition1_probes(boxes, config.condition1_probes);
    return run_family_iteration(box_family(q, instance.b(), boxes), x0, config, mon);
}

RunTrace run_fca(const OperatorSchedule& q, const LlsInstance& instance, const SmoothingMatrix& s,
                 const Vector& x0, const SolverConfig& config) {
    certify_schedule(q, instance);
    // A fixed point of Q need not be fixed by S, so only the step rule stops.
    auto mon = instance_monitors(instance, Vector(instance.cols()), false);
    return run_family_iteration(smoothing_family(q, instance.b(), s), x0, config, mon);
}

RunTrace run_fca(const OperatorSchedule& q, const LlsInstance& instance, const Vector& x0,
                 const SolverConfig& config) {
    certify_schedule(q, instance);
    auto mon = instance_monitors(instance, terminal_delta(q, instance), true);
    return run_family_iteration(plain_family(q, instance.b()), x0, config, mon);
}

// ---------------------------------------------------------------------------
// Fixed-point shift

DeltaResult compute_delta(const AffineOperator& q, const LlsInstance& instance) {
    const std::size_t n = instance.cols();
    if (q.dim() != n || q.data_dim() != instance.rows()) {
        throw DimensionError("compute_delta: operator does not match the instance");
    }
    const Matrix t_tilde = q.t * instance.projectors().row_space;
    DeltaResult out;
    out.t_tilde_norm = spectral_norm(t_tilde);
    if (!(out.t_tilde_norm < 1.0)) {
        std::ostringstream os;
        os << "compute_delta: ||T P_R(A^T)|| = " << out.t_tilde_norm << " is not below 1";
        throw PreconditionError(os.str());
    }
    const Matrix lhs = Matrix::identity(n) - t_tilde;
    const Vector rhs = q.r * instance.rhs_defect();
    out.delta = solve(lhs, rhs);
    out.solve_residual = norm2(lhs * out.delta - rhs);

    const Vector fixed = instance.x_ls() + out.delta;
    out.fixed_point_defect = norm2(apply(q, instance.b(), fixed) - fixed);
    if (out.fixed_point_defect > 1e-9 * (1.0 + norm2(fixed))) {
        std::ostringstream os;
        os.precision(17);
        os << "compute_delta: x_LS + delta is not fixed by " << q.label << " (defect "
           << out.fixed_point_defect << ")";
        throw ConstructionError(os.str());
    }
    return out;
}

FixedPointReport certify_fixed_point_set(const AffineOperator& q, const LlsInstance& instance,
                                         std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw PreconditionError("certify_fixed_point_set: samples must be >= 1");
    const std::size_t n = instance.cols();
    FixedPointReport rep;
    rep.delta = compute_delta(q, instance).delta;
    rep.samples = samples;

    // Converse route: Fix(Q) is the solution set of (I - T) x = R b, taken
    // from an independent pseudoinverse of I - T.
    const Matrix m = Matrix::identity(n) - q.t;
    const auto fm = svd(m);
    const Matrix m_pinv = pseudoinverse(fm);
    const Matrix m_null = subspace_projectors(fm).null_space;
    const Vector particular = m_pinv * (q.r * instance.b());
    const double bscale = 1.0 + norm2(instance.b());

    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector l = instance.x_ls() + instance.projectors().null_space * rng.vector(n);
        const Vector p = l + rep.delta;
        rep.forward_defect = std::max(
            rep.forward_defect, norm2(apply(q, instance.b(), p) - p) / (1.0 + norm2(p)));

        const Vector x = particular + m_null * rng.vector(n);
        rep.converse_fixed_defect = std::max(
            rep.converse_fixed_defect, norm2(apply(q, instance.b(), x) - x) / (1.0 + norm2(x)));
        rep.converse_defect =
            std::max(rep.converse_defect, instance.lss_residual(x - rep.delta) / bscale);
    }
    rep.passed = rep.forward_defect <= 1e-9 && rep.converse_defect <= 1e-9 &&
                 rep.converse_fixed_defect <= 1e-9;
    return rep;
}

// ---------------------------------------------------------------------------
// Monitors

FejerReport fejer_monitor(const RunTrace& trace, const OperatorFamily& family, const Vector& z) {
    if (trace.iterates.empty()) throw PreconditionError("fejer_monitor: empty trace");
    for (std::size_t j = 0; j <= family.terminal_index; ++j) {
        const double d = norm2(family.apply(j, z) - z);
        if (d > 1e-9 * (1.0 + norm2(z))) {
            std::ostringstream os;
            os << "fejer_monitor: reference point is not fixed by operator " << j << " (defect "
               << d << ")";
            throw PreconditionError(os.str());
        }
    }
    FejerReport rep;
    const Vector& x0 = trace.iterates.front().x;
    const double d0 = norm2(x0 - z);
    rep.slack = 1e-12 * (1.0 + d0);
    rep.norm_bound = norm2(z) + d0 + rep.slack;
    rep.max_increase = -std::numeric_limits<double>::infinity();
    double prev = d0;
    for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
        const Vector& x = trace.iterates[i].x;
        rep.max_norm = std::max(rep.max_norm, norm2(x));
        if (i == 0) continue;
        const double d = norm2(x - z);
        rep.max_increase = std::max(rep.max_increase, d - prev);
        prev = d;
    }
    if (trace.iterates.size() == 1) rep.max_increase = 0.0;
    rep.passed = rep.max_increase <= rep.slack && rep.max_norm <= rep.norm_bound;
    return rep;
}

std::vector<Condition1Row> condition1_monitor(const RunTrace& trace, const OperatorFamily& family,
                                              const Vector& z,
                                              const std::vector<Condition1Probe>& probes) {
    std::vector<Condition1Row> rows;
    for (const auto& p : probes) {
        Condition1Row row{p.l, p.k_min, 0, -std::numeric_limits<double>::infinity()};
        if (p.l < family.terminal_index) {
            for (const auto& it : trace.iterates) {
                if (it.k < p.k_min) continue;
                const double lhs = norm2(family.apply(it.k + 1, it.x) - z);
                const double rhs = norm2(family.apply(p.l, it.x) - z);
                row.max_defect = std::max(row.max_defect, lhs - rhs);
                ++row.evaluated;
            }
        }
        if (row.evaluated == 0) row.max_defect = 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fca
