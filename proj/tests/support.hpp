#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "fca/linalg.hpp"
#include "fca/random.hpp"

namespace fca::test {

// Random matrix with entries uniform in [-1, 1], rows redrawn until nonzero.
inline Matrix random_matrix(Rng& rng, std::size_t m, std::size_t n) {
    Matrix a = rng.matrix(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (double v : a.row(i)) s += v * v;
        while (s == 0.0) {
            for (double& v : a.row(i)) v = rng.uniform(-1.0, 1.0);
            s = 0.0;
            for (double v : a.row(i)) s += v * v;
        }
    }
    return a;
}

// Size in [lo, hi].
inline std::size_t random_size(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.index(hi - lo + 1));
}

// Product of random m x r and r x n factors: rank r almost surely.
inline Matrix random_low_rank(Rng& rng, std::size_t m, std::size_t n, std::size_t r) {
    return rng.matrix(m, r) * rng.matrix(r, n);
}

inline Eigen::MatrixXd to_eigen(const Matrix& a) {
    Eigen::MatrixXd e(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
    return e;
}

inline Eigen::VectorXd to_eigen(const Vector& x) {
    Eigen::VectorXd e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e(i) = x[i];
    return e;
}

inline double max_diff(const Matrix& a, const Matrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
    return d;
}

inline double max_diff(const Vector& a, const Vector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Fresh scratch directory under the test build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const std::filesystem::path p = std::filesystem::path(FCA_TEST_TMP) / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace fca::test
