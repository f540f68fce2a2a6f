#include "fca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fca/error.hpp"

namespace fca {

namespace {

void require_same_size(const Vector& x, const Vector& y, const char* op) {
    if (x.size() != y.size()) {
        throw DimensionError(std::string(op) + ": vector sizes " + std::to_string(x.size()) +
                             " and " + std::to_string(y.size()) + " differ");
    }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": matrix shapes differ");
    }
}

constexpr double kEps = 2.220446049250313e-16;
constexpr int kMaxJacobiSweeps = 80;

}  // namespace

// ---------------------------------------------------------------------------
// Vector / Matrix

Vector::Vector(std::size_t dim, double fill) : data_(dim, fill) {
    if (dim == 0) throw DimensionError("Vector: dimension must be at least 1");
}

Vector::Vector(std::vector<double> values) : data_(std::move(values)) {
    if (data_.empty()) throw DimensionError("Vector: dimension must be at least 1");
}

Vector::Vector(std::initializer_list<double> values) : data_(values) {
    if (data_.empty()) throw DimensionError("Vector: dimension must be at least 1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw DimensionError("Matrix: dimensions must be at least 1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (rows == 0 || cols == 0) throw DimensionError("Matrix: dimensions must be at least 1");
    if (data_.size() != rows * cols) {
        throw DimensionError("Matrix: expected " + std::to_string(rows * cols) + " entries, got " +
                             std::to_string(data_.size()));
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(m * n);
    for (const auto& r : rows) {
        if (r.size() != n) throw DimensionError("Matrix::from_rows: ragged rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix(m, n, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix id(n, n);
    for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
    return id;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix out(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out(i, i) = d[i];
    return out;
}

Vector Matrix::column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

Vector operator+(const Vector& x, const Vector& y) {
    require_same_size(x, y, "vector +");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

Vector operator-(const Vector& x, const Vector& y) {
    require_same_size(x, y, "vector -");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

Vector operator*(double s, const Vector& x) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = s * x[i];
    return out;
}

Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) {
        throw DimensionError("matrix-vector product: " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " times vector of size " +
                             std::to_string(x.size()));
    }
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
        out[i] = acc;
    }
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "matrix +");
    Matrix out = a;
    for (std::size_t k = 0; k < a.values().size(); ++k) out.data()[k] += b.data()[k];
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "matrix -");
    Matrix out = a;
    for (std::size_t k = 0; k < a.values().size(); ++k) out.data()[k] -= b.data()[k];
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    for (std::size_t k = 0; k < a.values().size(); ++k) out.data()[k] *= s;
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matrix product: inner dimensions " + std::to_string(a.cols()) +
                             " and " + std::to_string(b.rows()) + " differ");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const auto src = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Vector transpose_times(const Matrix& a, const Vector& x) {
    if (a.rows() != x.size()) throw DimensionError("transpose_times: size mismatch");
    Vector out(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        const double xi = x[i];
        for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j] * xi;
    }
    return out;
}

double dot(const Vector& x, const Vector& y) {
    require_same_size(x, y, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

double norm2(const Vector& x) {
    // Scaled accumulation so tiny and huge entries do not under/overflow.
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double acc = 0.0;
    for (double v : x) {
        const double t = v / scale;
        acc += t * t;
    }
    return scale * std::sqrt(acc);
}

double norm_inf(const Vector& x) {
    double out = 0.0;
    for (double v : x) out = std::max(out, std::abs(v));
    return out;
}

double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    for (double v : a.values()) acc += v * v;
    return std::sqrt(acc);
}

double max_abs(const Matrix& a) {
    double out = 0.0;
    for (double v : a.values()) out = std::max(out, std::abs(v));
    return out;
}

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// SVD

double rank_tolerance(std::size_t m, std::size_t n, double sigma_max) {
    return static_cast<double>(std::max(m, n)) * sigma_max * 1e-12;
}

namespace {

// Columns of `cols` (stored as rows, k x len) are orthonormal. Appends
// orthonormal vectors until there are `target` of them. Candidates are the
// standard basis vectors, taking the one with the largest residual each time.
void complete_orthonormal(std::vector<std::vector<double>>& basis, std::size_t len,
                          std::size_t target) {
    auto orthogonalize = [&](std::vector<double>& v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                double c = 0.0;
                for (std::size_t i = 0; i < len; ++i) c += q[i] * v[i];
                for (std::size_t i = 0; i < len; ++i) v[i] -= c * q[i];
            }
        }
    };
    while (basis.size() < target) {
        std::vector<double> best;
        double best_norm = -1.0;
        for (std::size_t e = 0; e < len; ++e) {
            std::vector<double> v(len, 0.0);
            v[e] = 1.0;
            orthogonalize(v);
            double nv = 0.0;
            for (double x : v) nv += x * x;
            nv = std::sqrt(nv);
            if (nv > best_norm) {
                best_norm = nv;
                best = std::move(v);
            }
        }
        for (double& x : best) x /= best_norm;
        basis.push_back(std::move(best));
    }
}

// Hestenes one-sided Jacobi for a tall (m >= n) matrix.
SvdFactorization svd_tall(const Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();

    // w[j] is column j of the working matrix, vt[j] is column j of V.
    std::vector<std::vector<double>> w(n, std::vector<double>(m));
    std::vector<std::vector<double>> vt(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) w[j][i] = a(i, j);
        vt[j][j] = 1.0;
    }

    const double tol = 4.0 * kEps;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += w[p][i] * w[p][i];
                    beta += w[q][i] * w[q][i];
                    gamma += w[p][i] * w[q][i];
                }
                if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wp = w[p][i];
                    const double wq = w[q][i];
                    w[p][i] = c * wp - s * wq;
                    w[q][i] = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = vt[p][i];
                    const double vq = vt[q][i];
                    vt[p][i] = c * vp - s * vq;
                    vt[q][i] = s * vp + c * vq;
                }
            }
        }
    }
    if (!converged) {
        throw ConvergenceError("svd: one-sided Jacobi did not converge within " +
                               std::to_string(kMaxJacobiSweeps) + " sweeps");
    }

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (double x : w[j]) acc += x * x;
        norms[j] = std::sqrt(acc);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

    SvdFactorization f;
    f.sigma.resize(n);
    f.v = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        f.sigma[k] = norms[j];
        for (std::size_t i = 0; i < n; ++i) f.v(i, k) = vt[j][i];
    }
    const double sigma_max = f.sigma.empty() ? 0.0 : f.sigma.front();
    const double tol_rank = rank_tolerance(m, n, sigma_max);
    f.rank = static_cast<std::size_t>(
        std::count_if(f.sigma.begin(), f.sigma.end(), [&](double s) { return s > tol_rank; }));

    // Left singular vectors: normalized columns for the numerically nonzero
    // part, re-orthogonalized; the rest completes an orthonormal basis.
    std::vector<std::vector<double>> ucols;
    ucols.reserve(m);
    for (std::size_t k = 0; k < f.rank; ++k) {
        std::vector<double> u = w[order[k]];
        for (double& x : u) x /= f.sigma[k];
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : ucols) {
                double c = 0.0;
                for (std::size_t i = 0; i < m; ++i) c += q[i] * u[i];
                for (std::size_t i = 0; i < m; ++i) u[i] -= c * q[i];
            }
        }
        double nu = 0.0;
        for (double x : u) nu += x * x;
        nu = std::sqrt(nu);
        for (double& x : u) x /= nu;
        ucols.push_back(std::move(u));
    }
    complete_orthonormal(ucols, m, m);
    f.u = Matrix(m, m);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < m; ++i) f.u(i, k) = ucols[k][i];
    return f;
}

}  // namespace

SvdFactorization svd(const Matrix& a) {
    if (a.empty()) throw DimensionError("svd: empty matrix");
    if (!all_finite(a)) throw PreconditionError("svd: matrix has non-finite entries");
    if (a.rows() >= a.cols()) return svd_tall(a);
    SvdFactorization ft = svd_tall(transpose(a));
    SvdFactorization f;
    f.u = std::move(ft.v);
    f.v = std::move(ft.u);
    f.sigma = std::move(ft.sigma);
    f.rank = ft.rank;
    return f;
}

Matrix pseudoinverse(const SvdFactorization& f) {
    const std::size_t m = f.u.rows();
    const std::size_t n = f.v.rows();
    Matrix out(n, m);
    for (std::size_t k = 0; k < f.rank; ++k) {
        const double inv = 1.0 / f.sigma[k];
        for (std::size_t i = 0; i < n; ++i) {
            const double vik = f.v(i, k) * inv;
            if (vik == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) out(i, j) += vik * f.u(j, k);
        }
    }
    return out;
}

Matrix pseudoinverse(const Matrix& a) { return pseudoinverse(svd(a)); }

namespace {

// Q_r Q_r^T for the first r columns of q.
Matrix leading_projector(const Matrix& q, std::size_t r) {
    const std::size_t n = q.rows();
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < r; ++k) acc += q(i, k) * q(j, k);
            p(i, j) = acc;
            p(j, i) = acc;
        }
    }
    return p;
}

}  // namespace

SubspaceProjectors subspace_projectors(const SvdFactorization& f) {
    SubspaceProjectors p;
    p.row_space = leading_projector(f.v, f.rank);
    p.null_space = Matrix::identity(f.v.rows()) - p.row_space;
    p.range = leading_projector(f.u, f.rank);
    p.left_null = Matrix::identity(f.u.rows()) - p.range;
    p.rank = f.rank;
    return p;
}

Matrix projector_range_at(const Matrix& a) {
    const auto f = svd(a);
    return leading_projector(f.v, f.rank);
}

Matrix projector_null(const Matrix& a) {
    return Matrix::identity(a.cols()) - projector_range_at(a);
}

Matrix projector_range(const Matrix& a) {
    const auto f = svd(a);
    return leading_projector(f.u, f.rank);
}

Matrix projector_null_at(const Matrix& a) {
    return Matrix::identity(a.rows()) - projector_range(a);
}

double spectral_norm(const Matrix& a) {
    const auto f = svd(a);
    return f.sigma.empty() ? 0.0 : f.sigma.front();
}

// ---------------------------------------------------------------------------
// LU solve

Vector solve(const Matrix& a, const Vector& rhs) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionError("solve: matrix is not square");
    if (rhs.size() != n) throw DimensionError("solve: right-hand side size mismatch");

    Matrix lu = a;
    Vector x = rhs;
    const double scale = std::max(max_abs(a), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
        if (std::abs(lu(piv, k)) <= static_cast<double>(n) * kEps * scale) {
            throw PreconditionError("solve: matrix is numerically singular at column " +
                                    std::to_string(k));
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            std::swap(x[k], x[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = lu(i, k) / lu(k, k);
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= l * lu(k, j);
            x[i] -= l * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double acc = x[k];
        for (std::size_t j = k + 1; j < n; ++j) acc -= lu(k, j) * x[j];
        x[k] = acc / lu(k, k);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Symmetric eigenproblem

SymmetricEigen symmetric_eigen(const Matrix& s) {
    const std::size_t n = s.rows();
    if (s.cols() != n) throw DimensionError("symmetric_eigen: matrix is not square");

    Matrix a = s;
    Matrix v = Matrix::identity(n);
    auto off_norm = [&] {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) acc += a(i, j) * a(i, j);
        return std::sqrt(acc);
    };
    const double total = std::max(frobenius_norm(a), 1e-300);

    int sweep = 0;
    while (off_norm() > kEps * total) {
        if (++sweep > kMaxJacobiSweeps) {
            throw ConvergenceError("symmetric_eigen: Jacobi did not converge");
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t =
                    std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

}  // namespace fca
