#pragma once

#include <optional>

#include "fca/linalg.hpp"

namespace fca {

// Problem data (A, b) for min ||A x - b||, with the factorization-derived
// quantities every certification step needs computed once on construction.
class LlsInstance {
public:
    LlsInstance(Matrix a, Vector b, std::optional<Vector> truth = std::nullopt);

    const Matrix& a() const noexcept { return a_; }
    const Vector& b() const noexcept { return b_; }
    const std::optional<Vector>& truth() const noexcept { return truth_; }

    std::size_t rows() const noexcept { return a_.rows(); }
    std::size_t cols() const noexcept { return a_.cols(); }

    const SvdFactorization& factorization() const noexcept { return svd_; }
    const SubspaceProjectors& projectors() const noexcept { return proj_; }
    const Matrix& pseudoinverse() const noexcept { return pinv_; }

    // Minimal-norm least-squares solution A^+ b.
    const Vector& x_ls() const noexcept { return x_ls_; }
    // P_{R(A)} b; every least-squares solution x satisfies A x = P_{R(A)} b.
    const Vector& projected_rhs() const noexcept { return b_range_; }
    // P_{N(A^T)} b; zero iff the system is consistent.
    const Vector& rhs_defect() const noexcept { return b_null_; }

    // ||A x - P_{R(A)} b||, zero iff x is a least-squares solution.
    double lss_residual(const Vector& x) const;

private:
    Matrix a_;
    Vector b_;
    std::optional<Vector> truth_;
    SvdFactorization svd_;
    SubspaceProjectors proj_;
    Matrix pinv_;
    Vector x_ls_;
    Vector b_range_;
    Vector b_null_;
};

}  // namespace fca
