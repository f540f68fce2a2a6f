#pragma once

// The family-constrained iteration x^{k+1} = S_{k+1}(Q(x^k)) and the generic
// family iteration x^{k+1} = T_{k+1}(x^k) it specializes, together with:
//
//  * the fixed-point shift Delta = (I - T~)^{-1} R P_{N(A^T)} b, for which
//    Fix(Q) = LSS(A; b) + Delta;
//  * monitors that check Fejer monotonicity and the family "Condition 1"
//    inequality along a recorded run.
//
// Indexing: step k (producing x^{k+1}) applies family member k + 1. For the
// constrained iteration member j is C_j after Q_{j-1} (member 0 pairs C_0 with
// Q_0), so an operator schedule is consumed from its first entry while box 0
// only enters through the monitors.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fca/affine_operators.hpp"
#include "fca/constraints.hpp"
#include "fca/instance.hpp"
#include "fca/linalg.hpp"

namespace fca {

struct SolverConfig {
    std::size_t max_iter = 100000;
    double step_tol = 1e-10;      // on ||x^{k+1} - x^k||_inf
    double residual_tol = 1e-13;  // on ||A (x^k - Delta) - P_{R(A)} b|| / (1 + ||b||)
    bool monitor_fejer = true;
    std::optional<Vector> reference_point;  // z in F, enables the monitors
    std::vector<std::size_t> condition1_probes;
    std::size_t stride = 10;  // full iterates kept every `stride` steps
};

// A family {T_j} with T_j = T_terminal for all j >= terminal_index.
struct OperatorFamily {
    std::function<Vector(std::size_t, const Vector&)> apply;
    std::size_t terminal_index = 0;
    // Box index of member j, when the family is box constrained.
    std::function<std::size_t(std::size_t)> box_index;
};

struct Condition1Probe {
    std::size_t l = 0;
    std::size_t k_min = 0;  // k(l): the inequality is expected for k >= k_min
};

// Per-run hooks for run_family_iteration; all optional.
struct RunMonitors {
    std::function<double(const Vector&)> residual;      // ||A x - b||
    std::function<double(const Vector&)> stop_residual;  // compared to residual_tol
    std::vector<Condition1Probe> probes;
};

enum class RunStatus { converged, max_iter };

std::string to_string(RunStatus s);

// Row k describes the iterate x^k. Step-dependent columns (step norm,
// condition 1 defect, box index) describe the step that produced x^k and are
// empty on row 0.
struct TraceRow {
    std::size_t k = 0;
    std::optional<double> residual;
    std::optional<double> step_norm;
    std::optional<double> fejer_distance;
    std::optional<double> condition1_defect;
    std::optional<std::size_t> box_index;
};

struct StoredIterate {
    std::size_t k = 0;
    Vector x;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    std::vector<StoredIterate> iterates;  // every `stride`-th, plus first and last
    Vector final_iterate;
    RunStatus status = RunStatus::max_iter;
    std::size_t iterations = 0;
};

// Iterates until the step norm drops below step_tol or the stop residual below
// residual_tol (both only checked once the terminal member is in use), or
// max_iter is reached. Throws DivergenceError on a non-finite iterate.
RunTrace run_family_iteration(const OperatorFamily& family, const Vector& x0,
                              const SolverConfig& config, const RunMonitors& monitors = {});

// Family builders. The operator schedule and b are copied into the family.
OperatorFamily plain_family(const OperatorSchedule& q, const Vector& b);
OperatorFamily box_family(const OperatorSchedule& q, const Vector& b, const BoxSchedule& boxes);
OperatorFamily smoothing_family(const OperatorSchedule& q, const Vector& b,
                                const SmoothingMatrix& s);

// The constrained algorithm. Operators are certified and box schedules checked
// for nesting before the first step (PreconditionError otherwise). With no
// constraint the run is the plain iteration x^{k+1} = Q_k(x^k).
RunTrace run_fca(const OperatorSchedule& q, const LlsInstance& instance, const BoxSchedule& boxes,
                 const Vector& x0, const SolverConfig& config);
RunTrace run_fca(const OperatorSchedule& q, const LlsInstance& instance, const SmoothingMatrix& s,
                 const Vector& x0, const SolverConfig& config);
RunTrace run_fca(const OperatorSchedule& q, const LlsInstance& instance, const Vector& x0,
                 const SolverConfig& config);

struct DeltaResult {
    Vector delta;
    double t_tilde_norm = 0.0;        // ||T P_{R(A^T)}||
    double solve_residual = 0.0;      // ||(I - T~) delta - R P_{N(A^T)} b||
    double fixed_point_defect = 0.0;  // ||Q(x_LS + delta) - (x_LS + delta)||
};

// Solves (I - T~) delta = R P_{N(A^T)} b directly and confirms that
// x_LS + delta is fixed by Q within 1e-9 (1 + ||x_LS + delta||).
DeltaResult compute_delta(const AffineOperator& q, const LlsInstance& instance);

struct FixedPointReport {
    Vector delta;
    double forward_defect = 0.0;   // max ||Q(l + delta) - (l + delta)|| / (1 + ||l + delta||), l in LSS
    double converse_defect = 0.0;  // max ||A (x - delta) - P_{R(A)} b|| / (1 + ||b||), x in Fix(Q)
    double converse_fixed_defect = 0.0;  // how well the sampled x solve Q(x) = x
    std::size_t samples = 0;
    bool passed = false;
};

// Samples both inclusions of Fix(Q) = LSS(A; b) + Delta. Tolerance 1e-9.
FixedPointReport certify_fixed_point_set(const AffineOperator& q, const LlsInstance& instance,
                                         std::size_t samples,
                                         std::uint64_t seed = kDefaultSampleSeed);

struct FejerReport {
    double max_increase = 0.0;  // max_k ||x^{k+1} - z|| - ||x^k - z|| over stored iterates
    double slack = 0.0;         // 1e-12 (1 + ||x^0 - z||)
    double max_norm = 0.0;      // max_k ||x^k||
    double norm_bound = 0.0;    // ||z|| + ||x^0 - z|| + slack
    bool passed = false;
};

// Requires every distinct member of the family to fix z within
// 1e-9 (1 + ||z||); throws PreconditionError naming the first that does not.
FejerReport fejer_monitor(const RunTrace& trace, const OperatorFamily& family, const Vector& z);

struct Condition1Row {
    std::size_t l = 0;
    std::size_t k_min = 0;
    std::size_t evaluated = 0;  // zero for l at or past the terminal index
    double max_defect = 0.0;    // max ||T_{k+1}(x^k) - z|| - ||T_l(x^k) - z||
};

// Evaluates the Condition 1 inequality on the stored iterates x^k, k >= k(l).
std::vector<Condition1Row> condition1_monitor(const RunTrace& trace, const OperatorFamily& family,
                                              const Vector& z,
                                              const std::vector<Condition1Probe>& probes);

// k(l) for each requested l, taken from verify_nesting.
std::vector<Condition1Probe> condition1_probes(const BoxSchedule& boxes,
                                               const std::vector<std::size_t>& ls);

}  // namespace fca
