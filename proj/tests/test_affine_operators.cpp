#include <doctest.h>

#include <cmath>
#include <string>

#include "fca/affine_operators.hpp"
#include "fca/error.hpp"
#include "fca/instance.hpp"
#include "support.hpp"

using namespace fca;
using fca::test::max_diff;

namespace {

// One relaxed Kaczmarz sweep applied directly, row by row.
Vector kaczmarz_sweep(const Matrix& a, const Vector& b, Vector x, double relaxation) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double ax = 0.0, nn = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            ax += a(i, j) * x[j];
            nn += a(i, j) * a(i, j);
        }
        const double c = relaxation * (b[i] - ax) / nn;
        for (std::size_t j = 0; j < a.cols(); ++j) x[j] += c * a(i, j);
    }
    return x;
}

// x + omega * sum_i w_i (b_i - <a_i, x>) / ||a_i||^2 a_i
Vector cimmino_step(const Matrix& a, const Vector& b, const Vector& x, double omega,
                    const Vector& w) {
    Vector out = x;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double ax = 0.0, nn = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            ax += a(i, j) * x[j];
            nn += a(i, j) * a(i, j);
        }
        const double c = omega * w[i] * (b[i] - ax) / nn;
        for (std::size_t j = 0; j < a.cols(); ++j) out[j] += c * a(i, j);
    }
    return out;
}

Vector uniform_weights(std::size_t m) { return Vector(m, 1.0 / static_cast<double>(m)); }

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("affine_operators") {

TEST_CASE("Kaczmarz worked examples") {
    SUBCASE("identity matrix") {
        const auto q = build_kaczmarz(Matrix::identity(2));
        CHECK(max_abs(q.t) <= 1e-15);
        CHECK(max_diff(q.r, Matrix::identity(2)) <= 1e-15);
        CHECK(apply(q, Vector{1.0, 2.0}, Vector{7.0, -3.0}) == Vector{1.0, 2.0});
    }
    SUBCASE("single column of ones") {
        const Matrix a = Matrix::from_rows({{1}, {1}});
        const auto q = build_kaczmarz(a);
        CHECK(q.t(0, 0) == 0.0);
        CHECK(q.r(0, 0) == 0.0);
        CHECK(q.r(0, 1) == 1.0);
        CHECK(apply(q, Vector{1.0, 0.0}, Vector{5.0}) == Vector{0.0});
    }
}

TEST_CASE("Kaczmarz preconditions") {
    const Matrix a = Matrix::from_rows({{1, 0}, {0, 0}, {1, 1}});
    const std::string msg = message_of([&] { build_kaczmarz(a); });
    CHECK(msg.find("row 1") != std::string::npos);
    CHECK_THROWS_AS(build_kaczmarz(a), ConstructionError);
    CHECK_THROWS_AS(build_kaczmarz(Matrix::identity(2), 0.0), PreconditionError);
    CHECK_THROWS_AS(build_kaczmarz(Matrix::identity(2), 2.0), PreconditionError);
}

TEST_CASE("Kaczmarz affine form reproduces the row-by-row sweep") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t m = test::random_size(rng, 1, 12);
        const std::size_t n = test::random_size(rng, 1, 12);
        const Matrix a = test::random_matrix(rng, m, n);
        const double relax = trial % 2 ? 1.0 : rng.uniform(0.2, 1.8);
        const auto q = build_kaczmarz(a, relax);
        for (int s = 0; s < 5; ++s) {
            const Vector b = rng.vector(m);
            const Vector x = rng.vector(n, -3.0, 3.0);
            const Vector direct = kaczmarz_sweep(a, b, x, relax);
            CHECK(max_diff(apply(q, b, x), direct) <= 1e-11 * (1.0 + norm_inf(direct)));
        }
    }
}

TEST_CASE("Cimmino worked examples and the direct formula") {
    const auto q = build_cimmino(Matrix::identity(2), 1.0, Vector{0.5, 0.5});
    CHECK(max_diff(q.t, 0.5 * Matrix::identity(2)) <= 1e-15);
    CHECK(max_diff(q.r, 0.5 * Matrix::identity(2)) <= 1e-15);
    const Vector b{3.0, -1.0};
    CHECK(max_diff(apply(q, b, b), b) <= 1e-15);

    const Matrix d12 = Matrix::from_rows({{1, 0}, {0, 2}});
    const auto q2 = build_cimmino(d12, 1.0, Vector{0.5, 0.5});
    const auto rep = validate_properties(q2, d12, 8);
    CHECK(rep.pr5_norm == doctest::Approx(0.5));  // T = I - A^T D A = diag(1/2, 1/2)
    CHECK(rep.passed());

    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = test::random_size(rng, 1, 10);
        const std::size_t n = test::random_size(rng, 1, 10);
        const Matrix a = test::random_matrix(rng, m, n);
        const auto c = build_cimmino(a);
        const Vector b = rng.vector(m);
        const Vector x = rng.vector(n);
        CHECK(max_diff(apply(c, b, x), cimmino_step(a, b, x, 1.0, uniform_weights(m))) <= 1e-12);
    }
}

TEST_CASE("Cimmino preconditions") {
    const Matrix a = Matrix::identity(2);
    CHECK_THROWS_AS(build_cimmino(a, 1.0, Vector{0.7, 0.7}), PreconditionError);
    CHECK_THROWS_AS(build_cimmino(a, 1.0, Vector{1.5, -0.5}), PreconditionError);
    CHECK_THROWS_AS(build_cimmino(a, 0.0), PreconditionError);
    CHECK_THROWS_AS(build_cimmino(Matrix::from_rows({{1, 1}, {0, 0}})), ConstructionError);
    // Too large a step breaks the contraction on R(A^T).
    const std::string msg = message_of([&] { build_cimmino(a, 4.0); });
    CHECK(msg.find("pr5") != std::string::npos);
}

TEST_CASE("diagonal weighting") {
    CHECK(max_diff(build_diagonal_weighting(Matrix::identity(2), Vector{1.0, 1.0}, 0.5).t,
                   0.5 * Matrix::identity(2)) <= 1e-15);
    CHECK_THROWS_AS(build_diagonal_weighting(Matrix::identity(2), Vector{1.0, 0.0}),
                    PreconditionError);

    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = test::random_size(rng, 2, 10);
        const Matrix a = test::random_matrix(rng, m, test::random_size(rng, 1, 10));
        Vector w = rng.vector(m, 0.1, 1.0);
        double total = 0.0;
        for (double v : w) total += v;
        for (double& v : w) v /= total;
        const auto rowsq = row_norms_squared(a);
        Vector d(m);
        for (std::size_t i = 0; i < m; ++i) d[i] = w[i] / rowsq[i];
        const auto c = build_cimmino(a, 1.0, w);
        const auto dw = build_diagonal_weighting(a, d, 1.0);
        CHECK(c.t == dw.t);
        CHECK(c.r == dw.r);
    }
}

TEST_CASE("Landweber worked examples") {
    const Matrix a = Matrix::from_rows({{2, 0}, {0, 1}});
    const auto s = build_landweber_schedule(a, {0.25}, 1e-6);
    const auto& q = s.terminal();
    CHECK(max_diff(q.t, Matrix::from_rows({{0, 0}, {0, 0.75}})) <= 1e-15);
    CHECK(max_diff(q.r, Matrix::from_rows({{0.5, 0}, {0, 0.25}})) <= 1e-15);
    const auto rep = validate_properties(q, a, 8);
    CHECK(rep.pr1_defect <= 1e-12);
    CHECK(rep.pr4_defect <= 1e-12);
    CHECK(rep.pr5_norm == doctest::Approx(0.75).epsilon(1e-14));

    CHECK_THROWS_AS(build_landweber_schedule(a, {0.5}, 0.0), PreconditionError);
    const std::string msg = message_of([&] { build_landweber_schedule(a, {0.1, 0.5}, 1e-6); });
    CHECK(msg.find("omega[1]") != std::string::npos);
    CHECK(msg.find("2/rho(A)^2 - eps") != std::string::npos);

    // Default relaxation 1 / rho^2 gives ||T~|| = max |1 - sigma_i^2 / sigma_1^2| over sigma_i > 0.
    const auto d = build_landweber_schedule(a, {}, default_landweber_epsilon(a));
    CHECK(d.prefix_size() == 0);
    CHECK(validate_properties(d.terminal(), a, 4).pr5_norm == doctest::Approx(0.75));
}

TEST_CASE("Landweber schedules index the prefix and repeat the terminal operator") {
    const Matrix a = Matrix::from_rows({{1, 0}, {0, 1}, {1, 1}});
    const auto s = build_landweber_schedule(a, {0.1, 0.2, 0.3}, 1e-3);
    CHECK(s.prefix_size() == 2);
    CHECK(s.at(0).relaxation == std::vector<double>{0.1});
    CHECK(s.at(1).relaxation == std::vector<double>{0.2});
    CHECK(s.at(2).relaxation == std::vector<double>{0.3});
    CHECK(s.at(50).relaxation == std::vector<double>{0.3});
}

TEST_CASE("apply examples") {
    const AffineOperator zero_t{Matrix(2, 2), Matrix::identity(2), "t0", {}};
    CHECK(apply(zero_t, Vector{4.0, 5.0}, Vector{1.0, 1.0}) == Vector{4.0, 5.0});
    const AffineOperator ident{Matrix::identity(2), Matrix(2, 2), "id", {}};
    CHECK(apply(ident, Vector{4.0, 5.0}, Vector{1.0, -1.0}) == Vector{1.0, -1.0});
    CHECK_THROWS_AS(apply(ident, Vector{1.0}, Vector{1.0, 1.0}), DimensionError);
}

TEST_CASE("broken operators are caught") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    // T = 0, R = 0: T + RA - I = -I.
    const AffineOperator zero{Matrix(2, 2), Matrix(2, 2), "zero", {}};
    const auto z = validate_properties(zero, a, 8);
    CHECK_FALSE(z.pr1_passed);
    CHECK(z.pr1_defect == doctest::Approx(std::sqrt(2.0)));
    // T = I, R = 0 satisfies pr1 but does not contract on R(A^T).
    const AffineOperator ident{Matrix::identity(2), Matrix(2, 2), "identity", {}};
    const auto i = validate_properties(ident, a, 8);
    CHECK(i.pr1_passed);
    CHECK_FALSE(i.pr5_passed);
    CHECK(i.pr5_norm == doctest::Approx(1.0));
    CHECK_FALSE(i.passed());
}

TEST_CASE("every built operator passes the property suite on random shapes") {
    Rng rng(14);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t m = test::random_size(rng, 1, 12);
        const std::size_t n = test::random_size(rng, 1, 15);
        const Matrix a = test::random_matrix(rng, m, n);
        const Vector d = rng.vector(m, 0.5, 1.5);
        const Vector rowsq = row_norms_squared(a);
        double scale = 0.0;
        for (std::size_t i = 0; i < m; ++i) scale += d[i] * rowsq[i];
        Vector dn(m);
        for (std::size_t i = 0; i < m; ++i) dn[i] = d[i] / scale;
        const std::vector<AffineOperator> ops{
            build_kaczmarz(a), build_kaczmarz(a, 1.5), build_cimmino(a),
            build_landweber_schedule(a, {}, default_landweber_epsilon(a)).terminal(),
            build_diagonal_weighting(a, dn)};
        for (const auto& q : ops) {
            CAPTURE(q.label);
            const auto rep = validate_properties(q, a, 16, 99 + trial);
            CHECK(rep.pr1_defect <= 1e-10 * (1.0 + frobenius_norm(a)));
            CHECK(rep.pr4_defect <= 1e-10);
            CHECK(rep.pr5_norm <= 1.0 - 1e-8);
            CHECK(rep.pr7_norm <= 1.0 + 1e-12);
            CHECK(rep.passed());
            if (n > m) CHECK(rep.pr6_witnesses > 0);
        }
    }
}

TEST_CASE("class membership sampling") {
    SUBCASE("trivial null space makes the equality branch vacuous") {
        const Matrix a = Matrix::from_rows({{1}, {1}});
        const auto rep = check_f1_membership(build_kaczmarz(a), a, Vector{1.0, 0.0}, 50);
        CHECK(rep.passed);
        CHECK(rep.equality_pairs == 0);
    }
    SUBCASE("wide matrices exercise the equality branch") {
        Rng rng(15);
        const Matrix a = test::random_matrix(rng, 4, 9);
        const Vector b = rng.vector(4);
        for (const auto& q : {build_kaczmarz(a), build_cimmino(a)}) {
            const auto rep = check_f1_membership(q, a, b, 200);
            CHECK(rep.passed);
            CHECK(rep.equality_pairs > 0);
            CHECK(rep.max_expansion <= 1e-12);
            CHECK(rep.max_equality_defect <= 1e-10);
        }
    }
}

TEST_CASE("minimizer of ||x - S Q(x)||^2") {
    const Matrix a = Matrix::from_rows({{1}, {1}});
    const auto q = build_kaczmarz(a);
    const Vector b{1.0, 0.0};
    const Vector x = minimize_g(q, b, Matrix::identity(1));
    CHECK(std::abs(x[0]) <= 1e-15);

    CHECK(max_abs(Matrix(1, 1)) == 0.0);
    CHECK(minimize_g(q, b, Matrix(1, 1)) == Vector{0.0});

    // Consistent wide system: the minimal-norm minimizer is a fixed point of Q.
    Rng rng(16);
    const Matrix w = test::random_matrix(rng, 3, 6);
    const Vector bw = w * rng.vector(6);
    const auto c = build_cimmino(w);
    const Vector xm = minimize_g(c, bw, Matrix::identity(6));
    CHECK(norm2(apply(c, bw, xm) - xm) <= 1e-10);
    CHECK(norm2(w * xm - bw) <= 1e-9);
}

}  // TEST_SUITE
