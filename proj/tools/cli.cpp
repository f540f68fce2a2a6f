#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fca/error.hpp"
#include "fca/io.hpp"
#include "fca/phantom.hpp"
#include "fca/solver.hpp"
#include "run_config.hpp"

namespace fca::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Flag values are captured separately and laid over the config file after
// parsing, so only flags actually present override it.
class Overrides {
public:
    template <class T>
    CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help,
                     std::function<void(RunConfig&, const T&)> set) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(name, *value, help);
        apply_.push_back([opt, value, set](RunConfig& cfg) {
            if (opt->count() > 0) set(cfg, *value);
        });
        return opt;
    }

    void apply(RunConfig& cfg) const {
        for (const auto& f : apply_) f(cfg);
    }

private:
    std::vector<std::function<void(RunConfig&)>> apply_;
};

void add_problem_flags(CLI::App* app, Overrides& ov) {
    ov.add<std::string>(app, "--matrix,-A", "Matrix Market file with A",
                        [](RunConfig& c, const std::string& v) { c.matrix = v; });
    ov.add<std::string>(app, "--rhs,-b", "right-hand side, one value per line",
                        [](RunConfig& c, const std::string& v) { c.rhs = v; });
    ov.add<std::string>(app, "--method", "kaczmarz | cimmino | landweber | dw | custom",
                        [](RunConfig& c, const std::string& v) { c.method = v; });
    ov.add<double>(app, "--relaxation", "Kaczmarz relaxation in (0, 2)",
                   [](RunConfig& c, const double& v) { c.relaxation = v; });
    ov.add<std::vector<double>>(app, "--omega", "step sizes; Landweber accepts a schedule",
                                [](RunConfig& c, const std::vector<double>& v) { c.omegas = v; });
    ov.add<double>(app, "--epsilon", "Landweber bound margin",
                   [](RunConfig& c, const double& v) { c.epsilon = v; });
    ov.add<std::string>(app, "--weights", "Cimmino row weights file",
                        [](RunConfig& c, const std::string& v) { c.weights = v; });
    ov.add<std::string>(app, "--diagonal", "diagonal weighting file",
                        [](RunConfig& c, const std::string& v) { c.diagonal = v; });
    ov.add<std::string>(app, "--t-matrix", "custom operator T (Matrix Market)",
                        [](RunConfig& c, const std::string& v) { c.t_matrix = v; });
    ov.add<std::string>(app, "--r-matrix", "custom operator R (Matrix Market)",
                        [](RunConfig& c, const std::string& v) { c.r_matrix = v; });
    ov.add<std::string>(app, "--constraint", "none | box | smoothing",
                        [](RunConfig& c, const std::string& v) { c.constraint = v; });
    ov.add<std::string>(app, "--schedule", "box schedule (JSON)",
                        [](RunConfig& c, const std::string& v) { c.schedule = v; });
    ov.add<std::string>(app, "--smoothing", "smoothing matrix (Matrix Market)",
                        [](RunConfig& c, const std::string& v) { c.smoothing = v; });
    ov.add<std::string>(app, "--truth", "ground truth vector, enables ghost counting",
                        [](RunConfig& c, const std::string& v) { c.truth = v; });
}

void add_solver_flags(CLI::App* app, Overrides& ov) {
    ov.add<std::size_t>(app, "--max-iter", "iteration budget",
                        [](RunConfig& c, const std::size_t& v) { c.max_iter = v; });
    ov.add<double>(app, "--step-tol", "sup-norm step tolerance",
                   [](RunConfig& c, const double& v) { c.step_tol = v; });
    ov.add<double>(app, "--residual-tol", "relative least-squares residual tolerance",
                   [](RunConfig& c, const double& v) { c.residual_tol = v; });
    ov.add<std::size_t>(app, "--stride", "keep every stride-th iterate",
                        [](RunConfig& c, const std::size_t& v) { c.stride = v; });
    ov.add<bool>(app, "--monitor-fejer", "record distances to the reference point",
                 [](RunConfig& c, const bool& v) { c.monitor_fejer = v; });
    ov.add<std::vector<std::size_t>>(
        app, "--probes", "Condition 1 probe indices",
        [](RunConfig& c, const std::vector<std::size_t>& v) { c.probes = v; });
    ov.add<std::string>(app, "--x0", "starting point (default zero)",
                        [](RunConfig& c, const std::string& v) { c.x0 = v; });
    ov.add<std::string>(app, "--reference,-z", "reference point z for the monitors",
                        [](RunConfig& c, const std::string& v) { c.reference = v; });
    ov.add<std::string>(app, "--output,-o", "output directory",
                        [](RunConfig& c, const std::string& v) { c.output = v; });
}

void add_sampling_flags(CLI::App* app, Overrides& ov) {
    ov.add<std::size_t>(app, "--samples", "random samples per check",
                        [](RunConfig& c, const std::size_t& v) { c.samples = v; });
    ov.add<std::uint64_t>(app, "--seed", "sampling seed",
                          [](RunConfig& c, const std::uint64_t& v) { c.seed = v; });
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) { return io::format_double(v); }

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

Vector load_point(const std::optional<fs::path>& path, std::size_t n, const char* what) {
    if (!path) return Vector(n);
    Vector v = io::read_vector(*path);
    if (v.size() != n) {
        throw DimensionError(std::string(what) + " has " + std::to_string(v.size()) +
                             " entries, expected " + std::to_string(n));
    }
    return v;
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const LlsInstance inst = load_instance(cfg);
    const OperatorSchedule q = build_schedule(cfg, inst.a());
    const std::size_t n = inst.cols();
    const Vector x0 = load_point(cfg.x0, n, "starting point");

    SolverConfig sc;
    sc.max_iter = cfg.max_iter;
    sc.step_tol = cfg.step_tol;
    sc.residual_tol = cfg.residual_tol;
    sc.stride = cfg.stride;
    sc.monitor_fejer = cfg.monitor_fejer;
    sc.condition1_probes = cfg.probes;
    if (cfg.reference) sc.reference_point = load_point(cfg.reference, n, "reference point");

    std::optional<BoxSchedule> boxes;
    std::optional<SmoothingMatrix> smooth;
    RunTrace trace;
    OperatorFamily family;
    if (cfg.constraint == "box") {
        if (!cfg.schedule) throw PreconditionError("constraint box needs --schedule");
        boxes = io::read_box_schedule(*cfg.schedule);
        trace = run_fca(q, inst, *boxes, x0, sc);
        family = box_family(q, inst.b(), *boxes);
    } else if (cfg.constraint == "smoothing") {
        if (!cfg.smoothing) throw PreconditionError("constraint smoothing needs --smoothing");
        smooth = smoothing_validate(io::read_matrix_market(*cfg.smoothing));
        trace = run_fca(q, inst, *smooth, x0, sc);
        family = smoothing_family(q, inst.b(), *smooth);
    } else if (cfg.constraint == "none") {
        trace = run_fca(q, inst, x0, sc);
        family = plain_family(q, inst.b());
    } else {
        throw PreconditionError("unknown constraint '" + cfg.constraint +
                                "' (expected none, box or smoothing)");
    }

    const DeltaResult delta = compute_delta(q.terminal(), inst);
    const TraceRow& last = trace.rows.back();

    json summary{{"method", cfg.method},
                 {"constraint", cfg.constraint},
                 {"status", to_string(trace.status)},
                 {"iterations", trace.iterations},
                 {"final_residual", number(*last.residual)},
                 {"final_step_norm", last.step_norm ? number(*last.step_norm) : json(nullptr)},
                 {"lss_residual", number(inst.lss_residual(trace.final_iterate - delta.delta))},
                 {"delta_norm", number(norm2(delta.delta))},
                 {"t_tilde_norm", number(delta.t_tilde_norm)},
                 {"delta_solve_residual", number(delta.solve_residual)},
                 {"operators", q.prefix_size() + 1}};

    bool monitors_ok = true;
    if (sc.reference_point) {
        const FejerReport fr = fejer_monitor(trace, family, *sc.reference_point);
        summary["fejer"] = {{"max_increase", number(fr.max_increase)},
                            {"slack", number(fr.slack)},
                            {"max_norm", number(fr.max_norm)},
                            {"norm_bound", number(fr.norm_bound)},
                            {"passed", fr.passed}};
        monitors_ok = fr.passed;
        if (boxes && !cfg.probes.empty()) {
            json rows = json::array();
            const auto probes = condition1_probes(*boxes, cfg.probes);
            for (const auto& r : condition1_monitor(trace, family, *sc.reference_point, probes)) {
                rows.push_back({{"l", r.l},
                                {"k_min", r.k_min},
                                {"evaluated", r.evaluated},
                                {"max_defect", number(r.max_defect)}});
                monitors_ok = monitors_ok && r.max_defect <= 1e-12;
            }
            summary["condition1"] = std::move(rows);
        }
    }
    if (inst.truth()) {
        summary["ghost_count"] = ghost_count(trace.final_iterate, *inst.truth());
    }
    if (boxes) summary["in_terminal_box"] = boxes->terminal().contains(trace.final_iterate);

    fs::create_directories(cfg.output);
    io::write_trace_csv(cfg.output / "trace.csv", trace);
    io::write_vector(cfg.output / "x.txt", trace.final_iterate);
    io::write_text(cfg.output / "summary.json", summary.dump(2) + "\n");

    out << "status: " << to_string(trace.status) << '\n'
        << "iterations: " << trace.iterations << '\n'
        << "final residual: " << fmt(*last.residual) << '\n'
        << "delta norm: " << fmt(norm2(delta.delta)) << '\n'
        << "||T P_R(A^T)||: " << fmt(delta.t_tilde_norm) << '\n';
    if (summary.contains("ghost_count")) out << "ghost count: " << summary["ghost_count"] << '\n';
    if (!monitors_ok) out << "warning: a monitor reported a violation, see summary.json\n";
    out << "output: " << cfg.output.string() << '\n';
    return trace.status == RunStatus::converged ? kExitOk : kExitMaxIter;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const LlsInstance inst = load_instance(cfg);
    const OperatorSchedule q = build_schedule(cfg, inst.a());
    const std::size_t n = inst.cols();
    bool all_ok = true;

    std::vector<const AffineOperator*> ops;
    for (const auto& op : q.prefix()) ops.push_back(&op);
    ops.push_back(&q.terminal());

    out << std::left << std::setw(22) << "operator" << std::setw(26) << "check" << std::setw(26)
        << "value" << "result\n";
    auto row = [&](const std::string& who, const std::string& check, const std::string& value,
                   bool ok) {
        out << std::setw(22) << who << std::setw(26) << check << std::setw(26) << value
            << verdict(ok) << '\n';
        all_ok = all_ok && ok;
    };

    for (std::size_t i = 0; i < ops.size(); ++i) {
        const AffineOperator& op = *ops[i];
        const std::string who = op.label + (ops.size() > 1 ? "#" + std::to_string(i) : "");
        const PropertyReport p = validate_properties(op, inst.a(), inst.projectors(), cfg.samples,
                                                     cfg.seed);
        row(who, "pr1 ||T+RA-I||_F", fmt(p.pr1_defect), p.pr1_passed);
        row(who, "pr4 ||P_N(A) R||", fmt(p.pr4_defect), p.pr4_passed);
        row(who, "pr5 ||T P_R(A^T)||", fmt(p.pr5_norm), p.pr5_passed);
        row(who, "pr6 null/shrink", fmt(p.pr6_null_defect) + " / " + fmt(p.pr6_min_shrink),
            p.pr6_passed);
        row(who, "pr7 ||T||", fmt(p.pr7_norm), p.pr7_passed);
        const F1Report f1 = check_f1_membership(op, inst.a(), inst.b(), cfg.samples, cfg.seed);
        row(who, "class membership", fmt(f1.max_expansion), f1.passed);
        const auto map = [&op, &inst](const Vector& x) { return apply(op, inst.b(), x); };
        const SneReport s = sne_sample_check(map, n, cfg.samples, cfg.seed);
        row(who, "nonexpansive", fmt(s.max_expansion), s.passed);
    }

    if (cfg.constraint == "box") {
        if (!cfg.schedule) throw PreconditionError("constraint box needs --schedule");
        const BoxSchedule boxes = io::read_box_schedule(*cfg.schedule);
        if (boxes.dim() != n) throw DimensionError("box schedule dimension does not match A");
        const NestingReport nest = verify_nesting(boxes);
        row("boxes", "nesting",
            nest.passed() ? "ok" : "violated at " + std::to_string(*nest.first_violation),
            nest.passed());
        std::vector<const Box*> distinct;
        for (const auto& b : boxes.prefix())
            if (distinct.empty() || !(*distinct.back() == b)) distinct.push_back(&b);
        if (distinct.empty() || !(*distinct.back() == boxes.terminal())) {
            distinct.push_back(&boxes.terminal());
        }
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            const SneReport s = sne_sample_check(*distinct[i], cfg.samples, cfg.seed);
            row("box#" + std::to_string(i), "strictly nonexpansive", fmt(s.max_expansion),
                s.passed);
            if (i + 1 < distinct.size() && distinct[i]->contains(*distinct[i + 1])) {
                const double d =
                    inclusion_inequality_check(*distinct[i], *distinct[i + 1], cfg.samples, cfg.seed);
                row("box#" + std::to_string(i), "inclusion inequality", fmt(d), d <= 1e-12);
            }
        }
    } else if (cfg.constraint == "smoothing") {
        if (!cfg.smoothing) throw PreconditionError("constraint smoothing needs --smoothing");
        const SmoothingMatrix s = smoothing_validate(io::read_matrix_market(*cfg.smoothing));
        if (s.dim() != n) throw DimensionError("smoothing dimension does not match A");
        row("smoothing", "symmetric stochastic", "ok", true);
        const SneReport r = sne_sample_check(s, cfg.samples, cfg.seed);
        row("smoothing", "strictly nonexpansive", fmt(r.max_expansion), r.passed);
    } else if (cfg.constraint != "none") {
        throw PreconditionError("unknown constraint '" + cfg.constraint + "'");
    }

    out << (all_ok ? "all checks passed\n" : "some checks failed\n");
    return all_ok ? kExitOk : kExitPrecondition;
}

// ---------------------------------------------------------------------------
// delta

int cmd_delta(const RunConfig& cfg, std::ostream& out) {
    const LlsInstance inst = load_instance(cfg);
    const OperatorSchedule q = build_schedule(cfg, inst.a());
    const DeltaResult d = compute_delta(q.terminal(), inst);
    out << "operator: " << q.terminal().label << '\n'
        << "delta norm: " << fmt(norm2(d.delta)) << '\n'
        << "||T P_R(A^T)||: " << fmt(d.t_tilde_norm) << '\n'
        << "solve residual: " << fmt(d.solve_residual) << '\n'
        << "fixed point defect: " << fmt(d.fixed_point_defect) << '\n'
        << "delta:\n";
    io::write_vector(out, d.delta);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// phantom

struct PhantomArgs {
    PhantomSpec spec;
    std::vector<std::string> families{"rows", "cols", "diag", "anti-diag"};
    AdaptiveBoxPolicy policy;
    bool truth_guard = true;
    fs::path output = "phantom";
};

int cmd_phantom(PhantomArgs args, std::ostream& out) {
    args.spec.families.clear();
    for (const auto& f : args.families) args.spec.families.push_back(parse_ray_family(f));
    validate(args.policy);
    const Phantom ph = generate(args.spec);
    const LlsInstance& inst = ph.instance;
    const std::size_t n = inst.cols();

    // Probe run with the constant unit box, then the adaptive schedule.
    const OperatorSchedule q =
        build_landweber_schedule(inst.a(), {}, default_landweber_epsilon(inst.a()));
    SolverConfig probe_cfg;
    probe_cfg.stride = 1;
    probe_cfg.max_iter = args.policy.trigger_iterations.back() + 1;
    const BoxSchedule fixed = fixed_box_schedule(n);
    const RunTrace probe = run_family_iteration(box_family(q, inst.b(), fixed), Vector(n), probe_cfg);
    std::optional<Vector> guard;
    if (args.truth_guard) guard = ph.truth;
    const AdaptiveSchedule adaptive = adaptive_box_schedule(args.policy, probe, guard);

    fs::create_directories(args.output);
    io::write_matrix_market(args.output / "A.mtx", inst.a(), io::MatrixFormat::coordinate);
    io::write_vector(args.output / "b.txt", inst.b());
    io::write_vector(args.output / "truth.txt", ph.truth);
    io::write_box_schedule(args.output / "box_fixed.json", fixed);
    io::write_box_schedule(args.output / "box_adaptive.json", adaptive.schedule);

    for (const char* kind : {"fixed", "adaptive"}) {
        json run{{"method", "landweber"},
                 {"matrix", "A.mtx"},
                 {"rhs", "b.txt"},
                 {"truth", "truth.txt"},
                 {"reference", "truth.txt"},
                 {"constraint", "box"},
                 {"schedule", std::string("box_") + kind + ".json"},
                 {"output", std::string("run_") + kind}};
        io::write_text(args.output / (std::string("solve_") + kind + ".json"), run.dump(2) + "\n");
    }

    json families = json::array();
    for (auto f : args.spec.families) families.push_back(to_string(f));
    json events = json::array();
    for (const auto& e : adaptive.guard_events) {
        events.push_back({{"trigger", e.trigger},
                          {"component", e.component},
                          {"proposed_lower", e.proposed_lower},
                          {"proposed_upper", e.proposed_upper},
                          {"truth", e.truth_value}});
    }
    json summary{{"grid", args.spec.grid},
                 {"particles", args.spec.particles},
                 {"seed", args.spec.seed},
                 {"families", families},
                 {"rows", inst.rows()},
                 {"cols", n},
                 {"rank", inst.projectors().rank},
                 {"particle_pixels", ph.particle_pixels},
                 {"policy",
                  {{"trigger_iterations", args.policy.trigger_iterations},
                   {"theta_hi", args.policy.theta_hi},
                   {"theta_lo", args.policy.theta_lo},
                   {"shrink_width", args.policy.shrink_width},
                   {"truth_guard", args.truth_guard}}},
                 {"probe_indices", adaptive.probe_indices},
                 {"guard_events", events}};
    io::write_text(args.output / "summary.json", summary.dump(2) + "\n");

    out << "phantom " << args.spec.grid << "x" << args.spec.grid << ", " << args.spec.particles
        << " particles, seed " << args.spec.seed << '\n'
        << "A: " << inst.rows() << " x " << n << ", rank " << inst.projectors().rank << '\n'
        << "guard events: " << adaptive.guard_events.size() << '\n'
        << "output: " << args.output.string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const fs::path& dir, std::ostream& out) {
    json summary;
    const fs::path summary_path = dir / "summary.json";
    try {
        summary = json::parse(io::read_text(summary_path));
    } catch (const json::parse_error& e) {
        throw IoError(summary_path.string() + ": " + e.what());
    }

    const fs::path trace_path = dir / "trace.csv";
    std::istringstream csv(io::read_text(trace_path));
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(csv, line) ||
        line != "k,residual,step_norm,fejer_distance,condition1_defect,box_index") {
        throw IoError(trace_path.string() + ":1: unexpected header");
    }
    std::size_t rows = 0;
    double min_res = std::numeric_limits<double>::infinity();
    double last_step = std::numeric_limits<double>::quiet_NaN();
    double fejer_inc = -std::numeric_limits<double>::infinity();
    double c1 = -std::numeric_limits<double>::infinity();
    std::optional<double> prev_fejer;
    std::set<std::string> boxes;
    while (std::getline(csv, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        const std::string where = trace_path.string() + ":" + std::to_string(lineno);
        if (cells.size() != 6) throw IoError(where + ": expected 6 columns");
        ++rows;
        if (!cells[1].empty()) min_res = std::min(min_res, io::parse_double(cells[1], where));
        if (!cells[2].empty()) last_step = io::parse_double(cells[2], where);
        if (!cells[3].empty()) {
            const double d = io::parse_double(cells[3], where);
            if (prev_fejer) fejer_inc = std::max(fejer_inc, d - *prev_fejer);
            prev_fejer = d;
        }
        if (!cells[4].empty()) c1 = std::max(c1, io::parse_double(cells[4], where));
        if (!cells[5].empty()) boxes.insert(cells[5]);
    }

    auto field = [&](const char* key) {
        return summary.contains(key) ? summary[key].dump() : std::string("n/a");
    };
    out << "status: " << (summary.contains("status") ? summary["status"].get<std::string>() : "n/a")
        << '\n'
        << "iterations: " << field("iterations") << '\n'
        << "trace rows: " << rows << '\n'
        << "final residual: " << field("final_residual") << '\n'
        << "min residual: " << fmt(min_res) << '\n'
        << "last step norm: " << fmt(last_step) << '\n'
        << "delta norm: " << field("delta_norm") << '\n';
    if (prev_fejer) out << "max fejer increase: " << fmt(fejer_inc) << '\n';
    if (std::isfinite(c1)) out << "max condition1 defect: " << fmt(c1) << '\n';
    if (!boxes.empty()) out << "distinct box indices: " << boxes.size() << '\n';
    if (summary.contains("ghost_count")) out << "ghost count: " << field("ghost_count") << '\n';
    return kExitOk;
}

RunConfig resolve(const std::string& config_path, const Overrides& ov) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    ov.apply(cfg);
    return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Constrained iterative least-squares solver", "fca"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides solve_ov, verify_ov, delta_ov;

    auto* solve = app.add_subcommand("solve", "run the constrained iteration");
    solve->add_option("--config,-c", config_path, "JSON run configuration");
    add_problem_flags(solve, solve_ov);
    add_solver_flags(solve, solve_ov);

    auto* verify = app.add_subcommand("verify", "check operator and constraint properties");
    verify->add_option("--config,-c", config_path, "JSON run configuration");
    add_problem_flags(verify, verify_ov);
    add_sampling_flags(verify, verify_ov);

    auto* delta = app.add_subcommand("delta", "compute the fixed-point shift");
    delta->add_option("--config,-c", config_path, "JSON run configuration");
    add_problem_flags(delta, delta_ov);

    PhantomArgs ph;
    std::string ph_output = ph.output.string();
    auto* phantom = app.add_subcommand("phantom", "generate a binary particle phantom");
    phantom->add_option("--grid,-g", ph.spec.grid, "grid side length")->capture_default_str();
    phantom->add_option("--particles,-p", ph.spec.particles, "particle count")->capture_default_str();
    phantom->add_option("--seed", ph.spec.seed, "generator seed")->capture_default_str();
    phantom->add_option("--families", ph.families, "rows, cols, diag, anti-diag");
    phantom->add_option("--triggers", ph.policy.trigger_iterations, "adaptive trigger iterations");
    phantom->add_option("--theta-hi", ph.policy.theta_hi, "upper threshold")->capture_default_str();
    phantom->add_option("--theta-lo", ph.policy.theta_lo, "lower threshold")->capture_default_str();
    phantom->add_option("--shrink", ph.policy.shrink_width, "shrunk interval width")
        ->capture_default_str();
    phantom->add_option("--truth-guard", ph.truth_guard, "keep the truth inside every box")
        ->capture_default_str();
    phantom->add_option("--output,-o", ph_output, "output directory")->capture_default_str();

    std::string report_dir;
    auto* report = app.add_subcommand("report", "summarize a solve output directory");
    report->add_option("dir", report_dir, "output directory of a solve")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitIo;
    }

    try {
        if (solve->parsed()) return cmd_solve(resolve(config_path, solve_ov), out);
        if (verify->parsed()) return cmd_verify(resolve(config_path, verify_ov), out);
        if (delta->parsed()) return cmd_delta(resolve(config_path, delta_ov), out);
        if (phantom->parsed()) {
            ph.output = ph_output;
            return cmd_phantom(ph, out);
        }
        if (report->parsed()) return cmd_report(report_dir, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitPrecondition;
    }
    return kExitIo;
}

}  // namespace fca::cli
