#include <doctest.h>

#include <cmath>
#include <limits>

#include "fca/affine_operators.hpp"
#include "fca/constraints.hpp"
#include "fca/error.hpp"
#include "fca/io.hpp"
#include "fca/solver.hpp"
#include "support.hpp"

using namespace fca;
using fca::test::max_diff;

namespace {

OperatorFamily constant_family(std::function<Vector(const Vector&)> f) {
    OperatorFamily fam;
    fam.apply = [f](std::size_t, const Vector& x) { return f(x); };
    fam.terminal_index = 0;
    return fam;
}

// Random instance; with m > n the data is almost surely inconsistent.
LlsInstance random_instance(Rng& rng, std::size_t m, std::size_t n) {
    return LlsInstance(test::random_matrix(rng, m, n), rng.vector(m));
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("identity family converges at the first step") {
    SolverConfig cfg;
    const auto tr = run_family_iteration(constant_family([](const Vector& x) { return x; }),
                                         Vector{1.0, 2.0}, cfg);
    CHECK(tr.status == RunStatus::converged);
    CHECK(tr.iterations == 1);
    CHECK(tr.final_iterate == Vector{1.0, 2.0});
    REQUIRE(tr.rows.size() == 2);
    CHECK_FALSE(tr.rows[0].step_norm.has_value());
    CHECK(*tr.rows[1].step_norm == 0.0);
}

TEST_CASE("geometric contraction toward zero") {
    SolverConfig cfg;
    cfg.reference_point = Vector(2);
    cfg.stride = 1;
    const auto fam = constant_family([](const Vector& x) { return 0.5 * x; });
    const auto tr = run_family_iteration(fam, Vector{1.0, 1.0}, cfg);
    CHECK(tr.status == RunStatus::converged);
    for (const auto& it : tr.iterates) {
        const double expect = std::ldexp(1.0, -static_cast<int>(it.k));
        CHECK(it.x == Vector{expect, expect});
    }
    for (std::size_t k = 1; k < tr.rows.size(); ++k) {
        CHECK(*tr.rows[k].fejer_distance < *tr.rows[k - 1].fejer_distance);
        CHECK(*tr.rows[k].fejer_distance ==
              doctest::Approx(std::sqrt(2.0) * std::ldexp(1.0, -static_cast<int>(k))));
    }
    const auto rep = fejer_monitor(tr, fam, Vector(2));
    CHECK(rep.passed);
    CHECK(rep.max_increase < 0.0);
}

TEST_CASE("a constant iterate at z gives zero Fejer differences") {
    SolverConfig cfg;
    cfg.stride = 1;
    const Vector z{0.3, -0.2};
    const auto fam = constant_family([z](const Vector&) { return z; });
    const auto tr = run_family_iteration(fam, z, cfg);
    const auto rep = fejer_monitor(tr, fam, z);
    CHECK(rep.max_increase == 0.0);
    CHECK(rep.passed);
}

TEST_CASE("Fejer monitor rejects a reference point that is not fixed") {
    SolverConfig cfg;
    const auto fam = constant_family([](const Vector& x) { return 0.5 * x; });
    const auto tr = run_family_iteration(fam, Vector{1.0}, cfg);
    CHECK_THROWS_AS(fejer_monitor(tr, fam, Vector{1.0}), PreconditionError);
}

TEST_CASE("run controls: budget, stride, divergence, bad settings") {
    SolverConfig cfg;
    cfg.max_iter = 7;
    cfg.stride = 3;
    const auto slow = constant_family([](const Vector& x) { return 0.99 * x; });
    const auto tr = run_family_iteration(slow, Vector{1.0}, cfg);
    CHECK(tr.status == RunStatus::max_iter);
    CHECK(tr.iterations == 7);
    CHECK(tr.rows.size() == 8);
    std::vector<std::size_t> ks;
    for (const auto& it : tr.iterates) ks.push_back(it.k);
    CHECK(ks == std::vector<std::size_t>{0, 3, 6, 7});

    SolverConfig c2;
    const auto blow = constant_family([](const Vector& x) {
        return Vector{x[0] * 1e200};
    });
    try {
        run_family_iteration(blow, Vector{1.0}, c2);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() == 2);
    }

    SolverConfig bad;
    bad.max_iter = 0;
    CHECK_THROWS_AS(run_family_iteration(slow, Vector{1.0}, bad), PreconditionError);
    bad.max_iter = 1;
    bad.step_tol = 0.0;
    CHECK_THROWS_AS(run_family_iteration(slow, Vector{1.0}, bad), PreconditionError);
}

TEST_CASE("stopping waits for the terminal member") {
    // Identity for members below 5, then a contraction: an early zero step
    // must not stop the run.
    OperatorFamily fam;
    fam.apply = [](std::size_t j, const Vector& x) { return j < 5 ? x : 0.5 * x; };
    fam.terminal_index = 5;
    SolverConfig cfg;
    const auto tr = run_family_iteration(fam, Vector{1.0}, cfg);
    CHECK(tr.status == RunStatus::converged);
    CHECK(tr.iterations > 5);
}

TEST_CASE("fixed-point shift: worked example and consistent systems") {
    const Matrix a = Matrix::from_rows({{1}, {1}});
    const LlsInstance inst(a, Vector{1.0, 0.0});
    const auto q = build_kaczmarz(a);
    const auto d = compute_delta(q, inst);
    CHECK(std::abs(d.delta[0] + 0.5) <= 1e-12);
    CHECK(d.t_tilde_norm == 0.0);
    CHECK(inst.x_ls()[0] == doctest::Approx(0.5));
    CHECK(apply(q, inst.b(), Vector{0.0}) == Vector{0.0});

    const auto rep = certify_fixed_point_set(q, inst, 10);
    CHECK(rep.passed);

    Rng rng(31);
    const Matrix w = test::random_matrix(rng, 4, 7);
    const LlsInstance consistent(w, w * rng.vector(7));
    CHECK(norm2(compute_delta(build_kaczmarz(w), consistent).delta) <= 1e-12);
}

TEST_CASE("shift for simultaneous methods on inconsistent data") {
    Rng rng(32);
    for (int trial = 0; trial < 5; ++trial) {
        const auto inst = random_instance(rng, 9, 5);
        REQUIRE(norm2(inst.rhs_defect()) > 1e-3);
        const auto& a = inst.a();

        // R = omega A^T annihilates N(A^T), so Landweber has no shift.
        const auto lw = build_landweber_schedule(a, {}, default_landweber_epsilon(a)).terminal();
        CHECK(norm2(compute_delta(lw, inst).delta) <= 1e-12);

        // Cimmino weights rows unequally; compare with a dense Eigen solve.
        const auto cq = build_cimmino(a);
        const auto d = compute_delta(cq, inst);
        const Eigen::MatrixXd ea = test::to_eigen(a);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(ea, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::Index r = svd.rank();
        const Eigen::MatrixXd vr = svd.matrixV().leftCols(r);
        const Eigen::MatrixXd un = svd.matrixU().rightCols(ea.rows() - r);
        const Eigen::MatrixXd lhs =
            Eigen::MatrixXd::Identity(5, 5) - test::to_eigen(cq.t) * vr * vr.transpose();
        const Eigen::VectorXd rhs =
            test::to_eigen(cq.r) * (un * un.transpose()) * test::to_eigen(inst.b());
        const Eigen::VectorXd oracle = lhs.partialPivLu().solve(rhs);
        for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(d.delta[i] - oracle(i)) <= 1e-10);
        CHECK(d.solve_residual <= 1e-9 * (1.0 + norm2(inst.b())));
        CHECK(d.fixed_point_defect <= 1e-9);
    }
}

TEST_CASE("fixed-point set characterization on random inconsistent Kaczmarz instances") {
    Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = test::random_size(rng, 2, 10);
        const std::size_t n = test::random_size(rng, 1, 10);
        const auto inst = random_instance(rng, m, n);
        const auto rep = certify_fixed_point_set(build_kaczmarz(inst.a()), inst, 20, trial + 1);
        CHECK(rep.forward_defect <= 1e-9);
        CHECK(rep.converse_defect <= 1e-9);
        CHECK(rep.converse_fixed_defect <= 1e-9);
        CHECK(rep.passed);
    }
}

TEST_CASE("compute_delta rejects operators without the contraction property") {
    const Matrix a = Matrix::from_rows({{1, 0}, {0, 1}});
    const LlsInstance inst(a, Vector{1.0, 1.0});
    const AffineOperator q{Matrix::identity(2), Matrix(2, 2), "broken", {}};
    CHECK_THROWS_AS(compute_delta(q, inst), PreconditionError);
}

TEST_CASE("constrained run with a constant box containing the solution set") {
    Rng rng(34);
    const Matrix a = test::random_matrix(rng, 6, 6);
    const Vector truth = rng.vector(6, 0.1, 0.9);
    const LlsInstance inst(a, a * truth);
    const auto q = build_landweber_schedule(a, {}, default_landweber_epsilon(a));
    const BoxSchedule boxes(Box::uniform(6, 0.0, 1.0));
    SolverConfig cfg;
    cfg.reference_point = truth;
    cfg.stride = 1;
    const auto tr = run_fca(q, inst, boxes, Vector(6), cfg);
    CHECK(tr.status == RunStatus::converged);
    CHECK(boxes.terminal().contains(tr.final_iterate));
    CHECK(norm2(a * tr.final_iterate - inst.b()) <= 1e-6 * (1.0 + norm2(inst.b())));
    CHECK(fejer_monitor(tr, box_family(q, inst.b(), boxes), truth).passed);
}

TEST_CASE("identity smoothing reproduces the plain iteration bitwise") {
    Rng rng(35);
    const auto inst = random_instance(rng, 5, 8);
    const auto q = build_landweber_schedule(inst.a(), {}, default_landweber_epsilon(inst.a()));
    SolverConfig cfg;
    cfg.max_iter = 300;
    const auto plain = run_fca(q, inst, Vector(8), cfg);
    const auto smooth = run_fca(q, inst, smoothing_validate(Matrix::identity(8)), Vector(8), cfg);
    CHECK(plain.final_iterate == smooth.final_iterate);
    REQUIRE(plain.rows.size() == smooth.rows.size());
    for (std::size_t k = 0; k < plain.rows.size(); ++k) {
        CHECK(plain.rows[k].residual == smooth.rows[k].residual);
        CHECK(plain.rows[k].step_norm == smooth.rows[k].step_norm);
    }
}

TEST_CASE("starting at a common fixed point converges at step one") {
    Rng rng(36);
    const Matrix a = test::random_matrix(rng, 4, 4);
    const Vector x = rng.vector(4, 0.2, 0.8);
    const LlsInstance inst(a, a * x);
    const auto q = build_cimmino(a);
    SolverConfig cfg;
    const auto tr = run_fca(q, inst, BoxSchedule(Box::uniform(4, 0.0, 1.0)), inst.x_ls(), cfg);
    CHECK(tr.iterations == 1);
    CHECK(*tr.rows[1].step_norm <= 1e-14);
}

TEST_CASE("run_fca refuses unnested schedules and uncertified operators") {
    const Matrix a = Matrix::identity(2);
    const LlsInstance inst(a, Vector{0.5, 0.5});
    const auto q = build_cimmino(a);
    const BoxSchedule bad({Box::uniform(2, 0.0, 0.4)}, Box::uniform(2, 0.0, 1.0));
    CHECK_THROWS_AS(run_fca(q, inst, bad, Vector(2), SolverConfig{}), PreconditionError);
    const AffineOperator broken{Matrix::identity(2), Matrix(2, 2), "broken", {}};
    CHECK_THROWS_AS(run_fca(broken, inst, Vector(2), SolverConfig{}), PreconditionError);
}

TEST_CASE("Condition 1 monitor") {
    Rng rng(37);
    const Matrix a = test::random_matrix(rng, 5, 9);
    const Vector truth = rng.vector(9, 0.45, 0.55);
    const LlsInstance inst(a, a * truth);
    const auto q = build_kaczmarz(a);

    SUBCASE("constant schedule gives identical sides") {
        const BoxSchedule boxes({Box::uniform(9, 0, 1), Box::uniform(9, 0, 1)}, Box::uniform(9, 0, 1));
        SolverConfig cfg;
        cfg.stride = 1;
        const auto tr = run_fca(q, inst, boxes, Vector(9), cfg);
        const auto fam = box_family(q, inst.b(), boxes);
        const auto rows = condition1_monitor(tr, fam, truth, condition1_probes(boxes, {0, 1}));
        for (const auto& r : rows) CHECK(r.max_defect <= 0.0);
    }
    SUBCASE("nested boxes around the reference point") {
        std::vector<Box> prefix;
        for (int k = 0; k < 30; ++k) prefix.push_back(Box::uniform(9, 0.01 * k, 1.0 - 0.01 * k));
        const BoxSchedule boxes(prefix, Box::uniform(9, 0.4, 0.6));
        SolverConfig cfg;
        cfg.stride = 1;
        cfg.reference_point = truth;
        cfg.condition1_probes = {0, 5, 17, 29, 40};
        const auto tr = run_fca(q, inst, boxes, Vector(9), cfg);
        const auto fam = box_family(q, inst.b(), boxes);
        const auto rows =
            condition1_monitor(tr, fam, truth, condition1_probes(boxes, cfg.condition1_probes));
        REQUIRE(rows.size() == 5);
        for (const auto& r : rows) CHECK(r.max_defect <= 1e-12);
        CHECK(rows[0].evaluated > 0);
        CHECK(rows[4].evaluated == 0);  // past the explicit schedule
        for (const auto& row : tr.rows)
            if (row.condition1_defect) CHECK(*row.condition1_defect <= 1e-12);
    }
}

TEST_CASE("trace rows carry box indices once a step is taken") {
    Rng rng(38);
    const Matrix a = test::random_matrix(rng, 3, 3);
    const LlsInstance inst(a, a * Vector{0.5, 0.5, 0.5});
    const auto q = build_kaczmarz(a);
    const BoxSchedule boxes({Box::uniform(3, 0, 1), Box::uniform(3, 0.1, 0.9)}, Box::uniform(3, 0.2, 0.8));
    SolverConfig cfg;
    cfg.max_iter = 5;
    cfg.step_tol = 1e-300;
    cfg.residual_tol = 1e-300;
    const auto tr = run_fca(q, inst, boxes, Vector(3), cfg);
    CHECK_FALSE(tr.rows[0].box_index.has_value());
    CHECK(*tr.rows[1].box_index == 1);
    CHECK(*tr.rows[2].box_index == 2);
    CHECK(*tr.rows[5].box_index == 2);
}

}  // TEST_SUITE
