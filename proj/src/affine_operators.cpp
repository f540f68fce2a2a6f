#include "fca/affine_operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fca/error.hpp"
#include "fca/random.hpp"

namespace fca {

namespace {

constexpr std::size_t kCertificationSamples = 16;

std::string describe_failure(const PropertyReport& rep) {
    std::ostringstream os;
    os.precision(17);
    if (!rep.pr1_passed) os << " pr1 (T + RA = I) defect " << rep.pr1_defect << ';';
    if (!rep.pr4_passed) os << " pr4 (R y in R(A^T)) defect " << rep.pr4_defect << ';';
    if (!rep.pr5_passed) os << " pr5 requires ||T P_R(A^T)|| < 1, got " << rep.pr5_norm << ';';
    if (!rep.pr6_passed) os << " pr6 (norm preserved iff x in N(A)) failed;";
    if (!rep.pr7_passed) os << " pr7 requires ||T|| <= 1, got " << rep.pr7_norm << ';';
    return os.str();
}

void certify(const AffineOperator& q, const Matrix& a, const SubspaceProjectors& proj) {
    const auto rep = validate_properties(q, a, proj, kCertificationSamples);
    if (!rep.passed()) {
        throw ConstructionError(q.label + ": operator failed certification:" +
                                describe_failure(rep));
    }
}

// T = I - omega A^T D A, R = omega A^T D.
AffineOperator weighted_simultaneous(const Matrix& a, const Vector& d, double omega,
                                     std::string label) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix r(n, m);
    for (std::size_t i = 0; i < m; ++i) {
        const double wi = omega * d[i];
        for (std::size_t j = 0; j < n; ++j) r(j, i) = a(i, j) * wi;
    }
    Matrix t = Matrix::identity(n) - r * a;
    return AffineOperator{std::move(t), std::move(r), std::move(label), {omega}};
}

}  // namespace

Vector apply(const AffineOperator& q, const Vector& b, const Vector& x) {
    if (x.size() != q.dim() || b.size() != q.data_dim()) {
        throw DimensionError("apply: operator " + q.label + " expects x of size " +
                             std::to_string(q.dim()) + " and b of size " +
                             std::to_string(q.data_dim()));
    }
    return q.t * x + q.r * b;
}

OperatorSchedule::OperatorSchedule(AffineOperator single) : terminal_(std::move(single)) {}

OperatorSchedule::OperatorSchedule(std::vector<AffineOperator> prefix, AffineOperator terminal)
    : prefix_(std::move(prefix)), terminal_(std::move(terminal)) {
    for (const auto& q : prefix_) {
        if (q.dim() != terminal_.dim() || q.data_dim() != terminal_.data_dim()) {
            throw DimensionError("OperatorSchedule: operators do not share dimensions");
        }
    }
}

Vector row_norms_squared(const Matrix& a) {
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (double v : a.row(i)) acc += v * v;
        out[i] = acc;
    }
    return out;
}

AffineOperator build_kaczmarz(const Matrix& a, double relaxation) {
    if (!(relaxation > 0.0 && relaxation < 2.0)) {
        throw PreconditionError("kaczmarz: relaxation must lie in (0, 2)");
    }
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const Vector rowsq = row_norms_squared(a);
    for (std::size_t i = 0; i < m; ++i) {
        if (rowsq[i] == 0.0) {
            throw ConstructionError("kaczmarz: row " + std::to_string(i) + " of A is zero");
        }
    }

    // Row step i: x <- (I - lambda a_i a_i^T / |a_i|^2) x + lambda a_i / |a_i|^2 b_i.
    // Left-multiplying the running (T, R) by each step composes the sweep.
    Matrix t = Matrix::identity(n);
    Matrix r(n, m);
    std::vector<double> scratch(std::max(n, m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto ai = a.row(i);
        const double coef = relaxation / rowsq[i];
        auto project_columns = [&](Matrix& mat) {
            // mat <- mat - coef * a_i (a_i^T mat)
            const std::size_t cols = mat.cols();
            std::fill(scratch.begin(), scratch.begin() + cols, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                const auto mk = mat.row(k);
                for (std::size_t j = 0; j < cols; ++j) scratch[j] += ai[k] * mk[j];
            }
            for (std::size_t k = 0; k < n; ++k) {
                const double c = coef * ai[k];
                if (c == 0.0) continue;
                auto mk = mat.row(k);
                for (std::size_t j = 0; j < cols; ++j) mk[j] -= c * scratch[j];
            }
        };
        project_columns(t);
        project_columns(r);
        for (std::size_t k = 0; k < n; ++k) r(k, i) += coef * ai[k];
    }
    return AffineOperator{std::move(t), std::move(r), "kaczmarz", {relaxation}};
}

AffineOperator build_cimmino(const Matrix& a, double omega, const Vector& weights) {
    const std::size_t m = a.rows();
    Vector w = weights.empty() ? Vector(m, 1.0 / static_cast<double>(m)) : weights;
    if (w.size() != m) throw DimensionError("cimmino: one weight per row required");
    double total = 0.0;
    for (double v : w) {
        if (!(v > 0.0)) throw PreconditionError("cimmino: weights must be positive");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("cimmino: weights must sum to 1");
    if (!(omega > 0.0)) throw PreconditionError("cimmino: omega must be positive");

    const Vector rowsq = row_norms_squared(a);
    Vector d(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (rowsq[i] == 0.0) {
            throw ConstructionError("cimmino: row " + std::to_string(i) + " of A is zero");
        }
        d[i] = w[i] / rowsq[i];
    }
    auto q = weighted_simultaneous(a, d, omega, "cimmino");
    certify(q, a, subspace_projectors(svd(a)));
    return q;
}

AffineOperator build_diagonal_weighting(const Matrix& a, const Vector& d, double omega) {
    if (d.size() != a.rows()) throw DimensionError("dw: one diagonal entry per row required");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0)) {
            throw PreconditionError("dw: diagonal entry " + std::to_string(i) +
                                    " must be strictly positive");
        }
    }
    if (!(omega > 0.0)) throw PreconditionError("dw: omega must be positive");
    auto q = weighted_simultaneous(a, d, omega, "dw");
    certify(q, a, subspace_projectors(svd(a)));
    return q;
}

double default_landweber_epsilon(const Matrix& a) {
    const double rho = spectral_norm(a);
    if (rho == 0.0) throw PreconditionError("landweber: A is zero, no default relaxation");
    return 1e-3 / (rho * rho);
}

OperatorSchedule build_landweber_schedule(const Matrix& a, const std::vector<double>& omegas,
                                          double epsilon) {
    if (!(epsilon > 0.0)) {
        throw PreconditionError(
            "landweber: requires 0 < eps <= omega_k <= 2/rho(A)^2 - eps with eps > 0");
    }
    const auto f = svd(a);
    const auto proj = subspace_projectors(f);
    const double rho = f.sigma.front();
    const double upper = rho > 0.0 ? 2.0 / (rho * rho) - epsilon
                                   : std::numeric_limits<double>::infinity();

    std::vector<double> schedule = omegas;
    if (schedule.empty()) {
        if (rho == 0.0) throw PreconditionError("landweber: A is zero, no default relaxation");
        schedule.push_back(1.0 / (rho * rho));
    }

    const Matrix ata = transpose(a) * a;
    const Matrix at = transpose(a);
    std::vector<AffineOperator> ops;
    ops.reserve(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const double w = schedule[k];
        if (!(w >= epsilon && w <= upper)) {
            std::ostringstream os;
            os.precision(17);
            os << "landweber: omega[" << k << "] = " << w
               << " violates 0 < eps <= omega_k <= 2/rho(A)^2 - eps (eps = " << epsilon
               << ", 2/rho(A)^2 - eps = " << upper << ')';
            throw ConstructionError(os.str());
        }
        AffineOperator q{Matrix::identity(a.cols()) - w * ata, w * at, "landweber", {w}};
        certify(q, a, proj);
        ops.push_back(std::move(q));
    }
    AffineOperator terminal = std::move(ops.back());
    ops.pop_back();
    return OperatorSchedule(std::move(ops), std::move(terminal));
}

// ---------------------------------------------------------------------------
// Certification

PropertyReport validate_properties(const AffineOperator& q, const Matrix& a, std::size_t samples,
                                   std::uint64_t seed) {
    return validate_properties(q, a, subspace_projectors(svd(a)), samples, seed);
}

PropertyReport validate_properties(const AffineOperator& q, const Matrix& a,
                                   const SubspaceProjectors& proj, std::size_t samples,
                                   std::uint64_t seed) {
    if (samples == 0) throw PreconditionError("validate_properties: samples must be >= 1");
    const std::size_t n = a.cols();
    if (q.dim() != n || q.data_dim() != a.rows()) {
        throw DimensionError("validate_properties: operator " + q.label +
                             " does not match the shape of A");
    }

    PropertyReport rep;
    rep.pr1_defect = frobenius_norm(q.t + q.r * a - Matrix::identity(n));
    rep.pr4_defect = spectral_norm(proj.null_space * q.r);
    rep.pr5_norm = spectral_norm(q.t * proj.row_space);
    rep.pr7_norm = spectral_norm(q.t);

    rep.pr1_passed = rep.pr1_defect <= 1e-10 * (1.0 + frobenius_norm(a));
    rep.pr4_passed = rep.pr4_defect <= 1e-10;
    rep.pr5_passed = rep.pr5_norm <= 1.0 - 1e-8;
    rep.pr7_passed = rep.pr7_norm <= 1.0 + 1e-12;

    // Null-space directions are constructed, not searched for: exact norm
    // equality has measure zero under random sampling.
    Rng rng(seed);
    const bool has_null = proj.rank < n;
    const bool has_row = proj.rank > 0;
    bool ok = true;
    rep.pr6_min_shrink = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector g = rng.vector(n);
        if (has_null) {
            const Vector x = proj.null_space * g;
            const Vector tx = q.t * x;
            const double nx = norm2(x);
            const double eq = norm2(tx - x) / (1.0 + nx);
            const double nd = std::abs(norm2(tx) - nx) / (1.0 + nx);
            rep.pr6_null_defect = std::max(rep.pr6_null_defect, eq);
            rep.pr6_norm_defect = std::max(rep.pr6_norm_defect, nd);
            ok = ok && eq <= 1e-10 && nd <= 1e-10;
            ++rep.pr6_witnesses;
        }
        if (has_row) {
            const double nx = norm2(g);
            const double shrink = (nx - norm2(q.t * g)) / nx;
            rep.pr6_min_shrink = std::min(rep.pr6_min_shrink, shrink);
            ok = ok && shrink > 0.0;
            ++rep.pr6_witnesses;
        }
    }
    if (!has_row) rep.pr6_min_shrink = 0.0;
    rep.pr6_passed = ok;
    return rep;
}

F1Report check_f1_membership(const AffineOperator& q, const Matrix& a, const Vector& b,
                             std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw PreconditionError("check_f1_membership: samples must be >= 1");
    const std::size_t n = a.cols();
    const auto f = svd(a);
    const auto proj = subspace_projectors(f);
    const bool has_null = f.rank < n;

    F1Report rep;
    rep.max_expansion = -std::numeric_limits<double>::infinity();
    Rng rng(seed);
    bool ok = true;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector x = rng.vector(n, -2.0, 2.0);
        const Vector y = rng.vector(n, -2.0, 2.0);
        const double expansion = norm2(apply(q, b, x) - apply(q, b, y)) - norm2(x - y);
        rep.max_expansion = std::max(rep.max_expansion, expansion);
        ok = ok && expansion <= 1e-12;
    }
    if (has_null) {
        for (std::size_t s = 0; s < samples; ++s) {
            const Vector y = rng.vector(n, -2.0, 2.0);
            const Vector x = y + proj.null_space * rng.vector(n, -2.0, 2.0);
            const Vector qx = apply(q, b, x);
            const Vector qy = apply(q, b, y);
            const Vector diff = x - y;
            const Vector disp = qy - y;
            const double eq = norm2((qx - qy) - diff);
            const double inner =
                std::abs(dot(diff, disp)) / (1.0 + norm2(diff) * norm2(disp));
            rep.max_equality_defect = std::max(rep.max_equality_defect, eq);
            rep.max_inner_defect = std::max(rep.max_inner_defect, inner);
            ok = ok && eq <= 1e-10 && inner <= 1e-10;
            ++rep.equality_pairs;
        }
    }
    rep.passed = ok;
    return rep;
}

Vector minimize_g(const AffineOperator& q, const Vector& b, const Matrix& s) {
    const std::size_t n = q.dim();
    if (s.rows() != n || s.cols() != n) throw DimensionError("minimize_g: S must be n x n");
    const Matrix m = Matrix::identity(n) - s * q.t;
    const Vector c = s * (q.r * b);
    return pseudoinverse(m) * c;
}

}  // namespace fca
