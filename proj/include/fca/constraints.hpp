#pragma once

// Constraining operators: metric projections onto axis-aligned boxes, box
// schedules realizing a family {C_k}, and symmetric stochastic smoothing
// matrices. Each comes with a sampled strict-nonexpansivity check.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fca/instance.hpp"
#include "fca/linalg.hpp"
#include "fca/random.hpp"

namespace fca {

using VectorMap = std::function<Vector(const Vector&)>;

// Closed box [lower, upper] with lower <= upper componentwise.
class Box {
public:
    Box(Vector lower, Vector upper);
    static Box uniform(std::size_t dim, double lo, double hi);

    const Vector& lower() const noexcept { return lower_; }
    const Vector& upper() const noexcept { return upper_; }
    std::size_t dim() const noexcept { return lower_.size(); }

    bool contains(const Vector& x) const;
    bool contains(const Box& inner) const;

    friend bool operator==(const Box&, const Box&) = default;

private:
    Vector lower_;
    Vector upper_;
};

// Componentwise clamp: the metric projection onto the box.
Vector box_project(const Box& box, const Vector& x);

// Finite prefix of boxes followed by a terminal box repeated forever.
class BoxSchedule {
public:
    explicit BoxSchedule(Box terminal);
    BoxSchedule(std::vector<Box> prefix, Box terminal);

    const Box& at(std::size_t k) const noexcept {
        return k < prefix_.size() ? prefix_[k] : terminal_;
    }
    const Box& terminal() const noexcept { return terminal_; }
    const std::vector<Box>& prefix() const noexcept { return prefix_; }
    std::size_t prefix_size() const noexcept { return prefix_.size(); }
    std::size_t dim() const noexcept { return terminal_.dim(); }

    // Index from which every box is the terminal one.
    std::size_t terminal_index() const noexcept { return prefix_.size(); }

private:
    std::vector<Box> prefix_;
    Box terminal_;
};

struct NestingWitness {
    std::size_t index = 0;                // l
    std::optional<std::size_t> k;         // smallest k(l) >= l, if one exists
};

struct NestingReport {
    // One entry per prefix index plus one for the terminal index.
    std::vector<NestingWitness> witnesses;
    std::optional<std::size_t> first_violation;
    bool passed() const noexcept { return !first_violation.has_value(); }
};

// For every l, the smallest k(l) >= l such that box j is contained in box l
// for all j > k(l), the terminal tail included.
NestingReport verify_nesting(const BoxSchedule& schedule);

// Intersection of every box in the schedule, terminal included; empty when
// some component has no common point.
std::optional<Box> common_intersection(const BoxSchedule& schedule);

// Max over sampled (z, y), y in the inner box, of
// ||C_inner z - y|| - ||C_outer z - y||. Throws PreconditionError unless
// inner is contained in outer.
double inclusion_inequality_check(const Box& outer, const Box& inner, std::size_t samples,
                                  std::uint64_t seed = 1);

// Symmetric, stochastic, positive-diagonal matrix, certified on construction
// by smoothing_validate.
class SmoothingMatrix {
public:
    const Matrix& matrix() const noexcept { return s_; }
    std::size_t dim() const noexcept { return s_.rows(); }
    const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
    // Orthonormal basis (as columns) of the eigenvalue-1 eigenspace.
    const std::vector<Vector>& fixed_basis() const noexcept { return fixed_basis_; }

    Vector apply(const Vector& x) const { return s_ * x; }

private:
    friend SmoothingMatrix smoothing_validate(const Matrix& s);
    Matrix s_;
    std::vector<double> eigenvalues_;
    std::vector<Vector> fixed_basis_;
};

// Checks symmetry (1e-10), entries >= -1e-14 (then clamped), unit row sums
// (1e-10) and a strictly positive diagonal, then spectrally: eigenvalues in
// (-1 + 1e-8, 1] and every unit-eigenvalue eigenvector fixed within 1e-9.
SmoothingMatrix smoothing_validate(const Matrix& s);

struct SneReport {
    double max_expansion = 0.0;        // max ||T x - T y|| - ||x - y||
    double max_equality_defect = 0.0;  // max ||(T x - T y) - (x - y)|| over constructed pairs
    std::size_t equality_pairs = 0;
    bool passed = false;
};

using PairGenerator = std::function<std::pair<Vector, Vector>(Rng&)>;

// Nonexpansivity over `samples` random pairs drawn uniformly from
// [-radius, radius]^dim, and difference preservation over `samples` pairs from
// the operator's known equality subspace when a generator is given.
// Tolerances: expansion <= 1e-12, equality defect <= 1e-10.
SneReport sne_sample_check(const VectorMap& op, std::size_t dim, std::size_t samples,
                           std::uint64_t seed, const PairGenerator& equality_pairs = {},
                           double radius = 2.0);

// Box: random points around the box; equality pairs are both inside it.
SneReport sne_sample_check(const Box& box, std::size_t samples, std::uint64_t seed = 1);

// Smoothing: equality pairs differ by a vector of the unit eigenspace.
SneReport sne_sample_check(const SmoothingMatrix& s, std::size_t samples,
                           std::uint64_t seed = 1);

// z inside the box (exact) and ||A (z - delta) - P_{R(A)} b|| <= tol (1 + ||b||).
bool vstar_membership(const Vector& z, const Box& box, const LlsInstance& instance,
                      const Vector& delta, double tol);

}  // namespace fca
