#pragma once

// Affine algorithmic operators Q(x) = T x + R b for the least-squares problem
// min ||A x - b||, built from row-action and simultaneous methods, plus the
// numerical certification of the structural properties such operators need:
//
//   (pr1) T + R A = I
//   (pr4) R y lies in R(A^T) for every y
//   (pr5) ||T P_{R(A^T)}|| < 1
//   (pr6) ||T x|| = ||x||  iff  x in N(A)
//   (pr7) ||T|| <= 1

#include <cstdint>
#include <string>
#include <vector>

#include "fca/linalg.hpp"

namespace fca {

inline constexpr std::uint64_t kDefaultSampleSeed = 20130705;

struct AffineOperator {
    Matrix t;  // n x n
    Matrix r;  // n x m
    std::string label;
    std::vector<double> relaxation;

    std::size_t dim() const noexcept { return t.rows(); }
    std::size_t data_dim() const noexcept { return r.cols(); }
};

// T x + R b, as two matrix-vector products and one addition.
Vector apply(const AffineOperator& q, const Vector& b, const Vector& x);

// Per-iteration operators: explicit prefix, then the terminal operator for
// every later index.
class OperatorSchedule {
public:
    OperatorSchedule(AffineOperator single);
    OperatorSchedule(std::vector<AffineOperator> prefix, AffineOperator terminal);

    const AffineOperator& at(std::size_t k) const noexcept {
        return k < prefix_.size() ? prefix_[k] : terminal_;
    }
    const AffineOperator& terminal() const noexcept { return terminal_; }
    const std::vector<AffineOperator>& prefix() const noexcept { return prefix_; }
    std::size_t prefix_size() const noexcept { return prefix_.size(); }

private:
    std::vector<AffineOperator> prefix_;
    AffineOperator terminal_;
};

// Squared Euclidean norms of the rows of a.
Vector row_norms_squared(const Matrix& a);

// One relaxed Kaczmarz sweep over rows 0..m-1 in order, composed into affine
// form. Throws ConstructionError naming a zero row; relaxation must be in (0, 2).
AffineOperator build_kaczmarz(const Matrix& a, double relaxation = 1.0);

// T = I - omega A^T D A,  R = omega A^T D,  D = diag(w_i / ||a_i||^2).
// Empty weights means w_i = 1/m. The result is certified; a failing property
// raises ConstructionError.
AffineOperator build_cimmino(const Matrix& a, double omega = 1.0, const Vector& weights = {});

// Same form as Cimmino with an arbitrary positive diagonal D = diag(d).
AffineOperator build_diagonal_weighting(const Matrix& a, const Vector& d, double omega = 1.0);

// T_k = I - omega_k A^T A, R_k = omega_k A^T, each omega_k required to satisfy
// eps <= omega_k <= 2 / rho(A)^2 - eps with eps > 0. An empty list yields the
// single operator with omega = 1 / rho(A)^2.
OperatorSchedule build_landweber_schedule(const Matrix& a, const std::vector<double>& omegas,
                                          double epsilon);

// A scale-aware epsilon for the Landweber bound: 1e-3 / rho(A)^2.
double default_landweber_epsilon(const Matrix& a);

struct PropertyReport {
    double pr1_defect = 0.0;  // ||T + R A - I||_F
    double pr4_defect = 0.0;  // ||P_{N(A)} R||_2
    double pr5_norm = 0.0;    // ||T P_{R(A^T)}||_2
    double pr7_norm = 0.0;    // ||T||_2

    // pr6, sampled: x in N(A) must be fixed by T; x with a row-space
    // component must strictly shrink.
    double pr6_null_defect = 0.0;     // max ||T x - x|| / (1 + ||x||), x in N(A)
    double pr6_norm_defect = 0.0;     // max | ||T x|| - ||x|| | / (1 + ||x||), x in N(A)
    double pr6_min_shrink = 0.0;      // min (||x|| - ||T x||) / ||x||, generic x
    std::size_t pr6_witnesses = 0;    // samples actually exercised

    bool pr1_passed = false;
    bool pr4_passed = false;
    bool pr5_passed = false;
    bool pr6_passed = false;
    bool pr7_passed = false;

    bool passed() const noexcept {
        return pr1_passed && pr4_passed && pr5_passed && pr6_passed && pr7_passed;
    }
};

// Tolerances: pr1 <= 1e-10 (1 + ||A||_F), pr4 <= 1e-10, pr5 <= 1 - 1e-8,
// pr7 <= 1 + 1e-12, pr6 null-space defects <= 1e-10.
PropertyReport validate_properties(const AffineOperator& q, const Matrix& a, std::size_t samples,
                                   std::uint64_t seed = kDefaultSampleSeed);
PropertyReport validate_properties(const AffineOperator& q, const Matrix& a,
                                   const SubspaceProjectors& proj, std::size_t samples,
                                   std::uint64_t seed = kDefaultSampleSeed);

struct F1Report {
    double max_expansion = 0.0;       // max ||Q x - Q y|| - ||x - y||
    double max_equality_defect = 0.0; // max ||(Q x - Q y) - (x - y)|| over x - y in N(A)
    double max_inner_defect = 0.0;    // max |<x - y, Q y - y>| / (1 + ||x - y|| ||Q y - y||)
    std::size_t equality_pairs = 0;   // zero when N(A) = {0}: the branch is vacuous
    bool passed = false;
};

// Sampled membership in the class of continuous operators that are 1-Lipschitz
// and whose norm-equality case forces difference preservation and
// orthogonality of the displacement.
F1Report check_f1_membership(const AffineOperator& q, const Matrix& a, const Vector& b,
                             std::size_t samples, std::uint64_t seed = kDefaultSampleSeed);

// Minimal-norm minimizer of g(x) = ||x - S Q(x)||^2, i.e. of
// ||(I - S T) x - S R b||^2, via the pseudoinverse of I - S T.
Vector minimize_g(const AffineOperator& q, const Vector& b, const Matrix& s);

}  // namespace fca
