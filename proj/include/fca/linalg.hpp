#pragma once

// Dense real linear algebra for desk-scale problems: value-semantic vector and
// matrix carriers, a one-sided Jacobi SVD, the Moore-Penrose pseudoinverse and
// the four fundamental subspace projectors.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fca {

class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double fill = 0.0);
    explicit Vector(std::vector<double> values);
    Vector(std::initializer_list<double> values);

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> data_;
};

// Row-major dense matrix. Both dimensions are at least one.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    Vector column(std::size_t j) const;

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    const std::vector<double>& values() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Vector operator+(const Vector& x, const Vector& y);
Vector operator-(const Vector& x, const Vector& y);
Vector operator*(double s, const Vector& x);
Vector operator*(const Matrix& a, const Vector& x);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix operator*(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
// a^T x without materializing the transpose.
Vector transpose_times(const Matrix& a, const Vector& x);

double dot(const Vector& x, const Vector& y);
double norm2(const Vector& x);
double norm_inf(const Vector& x);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

bool all_finite(std::span<const double> values);
inline bool all_finite(const Vector& x) { return all_finite(x.span()); }
inline bool all_finite(const Matrix& a) { return all_finite(std::span<const double>(a.values())); }

struct SvdFactorization {
    Matrix u;                   // m x m orthogonal
    std::vector<double> sigma;  // min(m, n) values, nonincreasing
    Matrix v;                   // n x n orthogonal
    std::size_t rank = 0;
};

// Numerical rank rule: sigma_i counts iff sigma_i > max(m, n) * sigma_1 * 1e-12.
double rank_tolerance(std::size_t m, std::size_t n, double sigma_max);

// One-sided (Hestenes) Jacobi on the taller orientation. Throws
// ConvergenceError if the sweep budget runs out.
SvdFactorization svd(const Matrix& a);

Matrix pseudoinverse(const Matrix& a);
Matrix pseudoinverse(const SvdFactorization& f);

// The four orthogonal projectors of A, built from one factorization.
struct SubspaceProjectors {
    Matrix row_space;   // P_{R(A^T)} = A^+ A   (n x n)
    Matrix null_space;  // P_{N(A)}   = I - A^+ A
    Matrix range;       // P_{R(A)}   = A A^+   (m x m)
    Matrix left_null;   // P_{N(A^T)} = I - A A^+
    std::size_t rank = 0;
};

SubspaceProjectors subspace_projectors(const SvdFactorization& f);

Matrix projector_range_at(const Matrix& a);  // onto R(A^T)
Matrix projector_null(const Matrix& a);      // onto N(A)
Matrix projector_range(const Matrix& a);     // onto R(A)
Matrix projector_null_at(const Matrix& a);   // onto N(A^T)

double spectral_norm(const Matrix& a);

// Square solve by LU with partial pivoting. Throws PreconditionError when a
// pivot vanishes relative to the matrix scale.
Vector solve(const Matrix& a, const Vector& rhs);

struct SymmetricEigen {
    std::vector<double> values;  // nonincreasing
    Matrix vectors;              // column j pairs with values[j]
};

// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
SymmetricEigen symmetric_eigen(const Matrix& s);

}  // namespace fca
