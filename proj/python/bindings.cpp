#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>

#include "fca/affine_operators.hpp"
#include "fca/constraints.hpp"
#include "fca/error.hpp"
#include "fca/instance.hpp"
#include "fca/io.hpp"
#include "fca/phantom.hpp"
#include "fca/solver.hpp"

namespace py = pybind11;

// NumPy arrays in and out for the dense carriers. Both directions copy.
namespace pybind11::detail {

template <>
struct type_caster<fca::Vector> {
    PYBIND11_TYPE_CASTER(fca::Vector, const_name("numpy.ndarray[float64[n]]"));

    bool load(handle src, bool convert) {
        if (!convert && !array_t<double>::check_(src)) return false;
        auto arr = array_t<double, array::c_style | array::forcecast>::ensure(src);
        if (!arr || arr.ndim() != 1) return false;
        value = fca::Vector(std::vector<double>(arr.data(), arr.data() + arr.size()));
        return true;
    }

    static handle cast(const fca::Vector& v, return_value_policy, handle) {
        array_t<double> out(static_cast<py::ssize_t>(v.size()));
        std::copy(v.begin(), v.end(), out.mutable_data());
        return out.release();
    }
};

template <>
struct type_caster<fca::Matrix> {
    PYBIND11_TYPE_CASTER(fca::Matrix, const_name("numpy.ndarray[float64[m, n]]"));

    bool load(handle src, bool convert) {
        if (!convert && !array_t<double>::check_(src)) return false;
        auto arr = array_t<double, array::c_style | array::forcecast>::ensure(src);
        if (!arr || arr.ndim() != 2 || arr.shape(0) == 0 || arr.shape(1) == 0) return false;
        value = fca::Matrix(static_cast<std::size_t>(arr.shape(0)),
                            static_cast<std::size_t>(arr.shape(1)),
                            std::vector<double>(arr.data(), arr.data() + arr.size()));
        return true;
    }

    static handle cast(const fca::Matrix& a, return_value_policy, handle) {
        array_t<double> out({static_cast<py::ssize_t>(a.rows()), static_cast<py::ssize_t>(a.cols())});
        std::copy(a.values().begin(), a.values().end(), out.mutable_data());
        return out.release();
    }
};

}  // namespace pybind11::detail

namespace {

using namespace fca;

py::dict property_dict(const PropertyReport& p) {
    py::dict d;
    d["pr1_defect"] = p.pr1_defect;
    d["pr4_defect"] = p.pr4_defect;
    d["pr5_norm"] = p.pr5_norm;
    d["pr6_null_defect"] = p.pr6_null_defect;
    d["pr6_min_shrink"] = p.pr6_min_shrink;
    d["pr7_norm"] = p.pr7_norm;
    d["pr1"] = p.pr1_passed;
    d["pr4"] = p.pr4_passed;
    d["pr5"] = p.pr5_passed;
    d["pr6"] = p.pr6_passed;
    d["pr7"] = p.pr7_passed;
    d["passed"] = p.passed();
    return d;
}

SolverConfig make_config(std::size_t max_iter, double step_tol, double residual_tol,
                         std::size_t stride, std::optional<Vector> reference,
                         std::vector<std::size_t> probes) {
    SolverConfig c;
    c.max_iter = max_iter;
    c.step_tol = step_tol;
    c.residual_tol = residual_tol;
    c.stride = stride;
    c.reference_point = std::move(reference);
    c.condition1_probes = std::move(probes);
    return c;
}

// Column of a trace as a float array, NaN where the monitor was inactive.
template <class Get>
py::array_t<double> column(const RunTrace& t, Get get) {
    py::array_t<double> out(static_cast<py::ssize_t>(t.rows.size()));
    double* p = out.mutable_data();
    for (const auto& r : t.rows) {
        const auto v = get(r);
        *p++ = v ? static_cast<double>(*v) : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Constrained iterative least-squares solvers with affine algorithmic operators.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<ConstructionError>(m, "ConstructionError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    // -- operators
    py::class_<AffineOperator>(m, "AffineOperator")
        .def(py::init([](Matrix t, Matrix r, std::string label) {
                 return AffineOperator{std::move(t), std::move(r), std::move(label), {}};
             }),
             py::arg("t"), py::arg("r"), py::arg("label") = "custom")
        .def_readonly("t", &AffineOperator::t)
        .def_readonly("r", &AffineOperator::r)
        .def_readonly("label", &AffineOperator::label)
        .def_readonly("relaxation", &AffineOperator::relaxation)
        .def("__call__", [](const AffineOperator& q, const Vector& b, const Vector& x) {
            return apply(q, b, x);
        }, py::arg("b"), py::arg("x"), "T x + R b")
        .def("__repr__", [](const AffineOperator& q) {
            return "<AffineOperator " + q.label + " n=" + std::to_string(q.dim()) + ">";
        });

    py::class_<OperatorSchedule>(m, "OperatorSchedule")
        .def(py::init<AffineOperator>(), py::arg("single"))
        .def(py::init<std::vector<AffineOperator>, AffineOperator>(), py::arg("prefix"),
             py::arg("terminal"))
        .def("at", &OperatorSchedule::at, py::arg("k"), py::return_value_policy::copy)
        .def_property_readonly("terminal", &OperatorSchedule::terminal, py::return_value_policy::copy)
        .def_property_readonly("prefix_size", &OperatorSchedule::prefix_size);
    py::implicitly_convertible<AffineOperator, OperatorSchedule>();

    m.def("build_kaczmarz", &build_kaczmarz, py::arg("a"), py::arg("relaxation") = 1.0);
    m.def(
        "build_cimmino",
        [](const Matrix& a, double omega, const std::optional<Vector>& weights) {
            return build_cimmino(a, omega, weights ? *weights : Vector{});
        },
        py::arg("a"), py::arg("omega") = 1.0, py::arg("weights") = py::none(),
        "Weights default to 1/m each.");
    m.def("build_diagonal_weighting", &build_diagonal_weighting, py::arg("a"), py::arg("d"),
          py::arg("omega") = 1.0);
    m.def(
        "build_landweber",
        [](const Matrix& a, const std::vector<double>& omegas, std::optional<double> epsilon) {
            return build_landweber_schedule(a, omegas, epsilon ? *epsilon : default_landweber_epsilon(a));
        },
        py::arg("a"), py::arg("omegas") = std::vector<double>{}, py::arg("epsilon") = py::none(),
        "Landweber schedule; epsilon defaults to 1e-3 / rho(A)^2.");
    m.def(
        "validate_properties",
        [](const AffineOperator& q, const Matrix& a, std::size_t samples, std::uint64_t seed) {
            return property_dict(validate_properties(q, a, samples, seed));
        },
        py::arg("op"), py::arg("a"), py::arg("samples") = 64, py::arg("seed") = kDefaultSampleSeed);

    // -- problem data
    py::class_<LlsInstance>(m, "LlsInstance")
        .def(py::init<Matrix, Vector, std::optional<Vector>>(), py::arg("a"), py::arg("b"),
             py::arg("truth") = py::none())
        .def_property_readonly("a", &LlsInstance::a)
        .def_property_readonly("b", &LlsInstance::b)
        .def_property_readonly("truth", &LlsInstance::truth)
        .def_property_readonly("x_ls", &LlsInstance::x_ls)
        .def_property_readonly("rank", [](const LlsInstance& i) { return i.projectors().rank; })
        .def_property_readonly("rhs_defect", &LlsInstance::rhs_defect)
        .def("lss_residual", &LlsInstance::lss_residual, py::arg("x"));

    m.def(
        "compute_delta",
        [](const AffineOperator& q, const LlsInstance& inst) {
            const DeltaResult d = compute_delta(q, inst);
            py::dict out;
            out["delta"] = d.delta;
            out["t_tilde_norm"] = d.t_tilde_norm;
            out["solve_residual"] = d.solve_residual;
            out["fixed_point_defect"] = d.fixed_point_defect;
            return out;
        },
        py::arg("op"), py::arg("instance"));

    // -- constraints
    py::class_<Box>(m, "Box")
        .def(py::init<Vector, Vector>(), py::arg("lower"), py::arg("upper"))
        .def_static("uniform", &Box::uniform, py::arg("dim"), py::arg("lo"), py::arg("hi"))
        .def_property_readonly("lower", &Box::lower)
        .def_property_readonly("upper", &Box::upper)
        .def("contains", py::overload_cast<const Vector&>(&Box::contains, py::const_), py::arg("x"))
        .def("project", [](const Box& b, const Vector& x) { return box_project(b, x); }, py::arg("x"))
        .def(py::self == py::self);

    py::class_<BoxSchedule>(m, "BoxSchedule")
        .def(py::init<Box>(), py::arg("terminal"))
        .def(py::init<std::vector<Box>, Box>(), py::arg("prefix"), py::arg("terminal"))
        .def("at", &BoxSchedule::at, py::arg("k"), py::return_value_policy::copy)
        .def_property_readonly("terminal", &BoxSchedule::terminal, py::return_value_policy::copy)
        .def_property_readonly("prefix_size", &BoxSchedule::prefix_size)
        .def("to_json", [](const BoxSchedule& s) { return io::box_schedule_json(s); })
        .def_static("from_json", [](const std::string& text) {
            return io::parse_box_schedule(text, "<string>");
        });

    m.def(
        "verify_nesting",
        [](const BoxSchedule& s) {
            const NestingReport r = verify_nesting(s);
            py::list k;
            for (const auto& w : r.witnesses) k.append(w.k ? py::cast(*w.k) : py::none());
            py::dict out;
            out["passed"] = r.passed();
            out["first_violation"] = r.first_violation;
            out["k"] = k;
            return out;
        },
        py::arg("schedule"));

    // -- iteration
    py::class_<RunTrace>(m, "RunTrace")
        .def_property_readonly("status", [](const RunTrace& t) { return to_string(t.status); })
        .def_readonly("iterations", &RunTrace::iterations)
        .def_readonly("x", &RunTrace::final_iterate)
        .def_property_readonly("residual",
                               [](const RunTrace& t) { return column(t, [](const TraceRow& r) { return r.residual; }); })
        .def_property_readonly("step_norm",
                               [](const RunTrace& t) { return column(t, [](const TraceRow& r) { return r.step_norm; }); })
        .def_property_readonly("fejer_distance",
                               [](const RunTrace& t) { return column(t, [](const TraceRow& r) { return r.fejer_distance; }); })
        .def_property_readonly("condition1_defect",
                               [](const RunTrace& t) { return column(t, [](const TraceRow& r) { return r.condition1_defect; }); })
        .def("iterate", [](const RunTrace& t, std::size_t k) -> py::object {
            for (const auto& s : t.iterates)
                if (s.k == k) return py::cast(s.x);
            return py::none();
        }, py::arg("k"), "Stored iterate x^k, or None when it was not kept.")
        .def("csv", [](const RunTrace& t) { return io::trace_csv(t); });

    m.def(
        "run_fca",
        [](const OperatorSchedule& q, const LlsInstance& inst, std::optional<BoxSchedule> boxes,
           std::optional<Vector> x0, std::size_t max_iter, double step_tol, double residual_tol,
           std::size_t stride, std::optional<Vector> reference, std::vector<std::size_t> probes) {
            const Vector start = x0 ? *x0 : Vector(inst.cols());
            const SolverConfig cfg =
                make_config(max_iter, step_tol, residual_tol, stride, std::move(reference), std::move(probes));
            py::gil_scoped_release release;
            return boxes ? run_fca(q, inst, *boxes, start, cfg) : run_fca(q, inst, start, cfg);
        },
        py::arg("schedule"), py::arg("instance"), py::arg("boxes") = py::none(),
        py::arg("x0") = py::none(), py::arg("max_iter") = 100000, py::arg("step_tol") = 1e-10,
        py::arg("residual_tol") = 1e-13, py::arg("stride") = 10, py::arg("reference") = py::none(),
        py::arg("probes") = std::vector<std::size_t>{},
        "Constrained iteration x^{k+1} = C(Q(x^k)); unconstrained without boxes.");

    m.def(
        "fejer_monitor",
        [](const RunTrace& t, const OperatorSchedule& q, const LlsInstance& inst,
           const BoxSchedule& boxes, const Vector& z) {
            const FejerReport r = fejer_monitor(t, box_family(q, inst.b(), boxes), z);
            py::dict out;
            out["max_increase"] = r.max_increase;
            out["slack"] = r.slack;
            out["max_norm"] = r.max_norm;
            out["norm_bound"] = r.norm_bound;
            out["passed"] = r.passed;
            return out;
        },
        py::arg("trace"), py::arg("schedule"), py::arg("instance"), py::arg("boxes"), py::arg("z"));

    // -- phantoms
    m.def(
        "generate_phantom",
        [](std::size_t grid, std::size_t particles, std::uint64_t seed,
           const std::vector<std::string>& families) {
            PhantomSpec spec{grid, particles, seed, {}};
            for (const auto& f : families) spec.families.push_back(parse_ray_family(f));
            Phantom ph = generate(spec);
            return py::make_tuple(std::move(ph.instance), std::move(ph.truth), ph.particle_pixels);
        },
        py::arg("grid") = 8, py::arg("particles") = 6, py::arg("seed") = 42,
        py::arg("families") = std::vector<std::string>{"rows", "cols", "diag", "anti-diag"},
        "Returns (instance, truth, particle_pixels).");
    m.def("fixed_box_schedule", &fixed_box_schedule, py::arg("n"));
    m.def(
        "adaptive_box_schedule",
        [](const RunTrace& probe, std::optional<Vector> truth, std::vector<std::size_t> triggers,
           double theta_hi, double theta_lo, double shrink_width) {
            const AdaptiveBoxPolicy policy{std::move(triggers), theta_hi, theta_lo, shrink_width};
            AdaptiveSchedule s = adaptive_box_schedule(policy, probe, truth);
            return py::make_tuple(std::move(s.schedule), s.guard_events.size(), s.probe_indices);
        },
        py::arg("probe"), py::arg("truth") = py::none(),
        py::arg("triggers") = std::vector<std::size_t>{50, 100, 200}, py::arg("theta_hi") = 0.8,
        py::arg("theta_lo") = 0.2, py::arg("shrink_width") = 0.05,
        "Returns (schedule, guard_event_count, probe_indices).");
    m.def("ghost_count", &ghost_count, py::arg("x"), py::arg("truth"), py::arg("threshold") = 0.5);

    // -- files
    py::enum_<io::MatrixFormat>(m, "MatrixFormat")
        .value("array", io::MatrixFormat::array)
        .value("coordinate", io::MatrixFormat::coordinate);
    m.def("read_matrix_market", &io::read_matrix_market, py::arg("path"));
    m.def("write_matrix_market",
          py::overload_cast<const std::filesystem::path&, const Matrix&, io::MatrixFormat>(
              &io::write_matrix_market),
          py::arg("path"), py::arg("a"), py::arg("format") = io::MatrixFormat::array);
    m.def("read_vector", &io::read_vector, py::arg("path"));
    m.def("write_vector", py::overload_cast<const std::filesystem::path&, const Vector&>(&io::write_vector),
          py::arg("path"), py::arg("x"));
}
