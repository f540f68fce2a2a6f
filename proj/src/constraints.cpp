#include "fca/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fca/error.hpp"

namespace fca {

// ---------------------------------------------------------------------------
// Boxes

Box::Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) throw DimensionError("Box: bounds differ in dimension");
    if (!all_finite(lower_) || !all_finite(upper_)) {
        throw PreconditionError("Box: bounds must be finite");
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (lower_[i] > upper_[i]) {
            throw PreconditionError("Box: lower bound exceeds upper bound in component " +
                                    std::to_string(i));
        }
    }
}

Box Box::uniform(std::size_t dim, double lo, double hi) {
    return Box(Vector(dim, lo), Vector(dim, hi));
}

bool Box::contains(const Vector& x) const {
    if (x.size() != dim()) throw DimensionError("Box::contains: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i)
        if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
    return true;
}

bool Box::contains(const Box& inner) const {
    if (inner.dim() != dim()) throw DimensionError("Box::contains: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i)
        if (inner.lower_[i] < lower_[i] || inner.upper_[i] > upper_[i]) return false;
    return true;
}

Vector box_project(const Box& box, const Vector& x) {
    if (x.size() != box.dim()) {
        throw DimensionError("box_project: point of size " + std::to_string(x.size()) +
                             " for a box of dimension " + std::to_string(box.dim()));
    }
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x[i];
        out[i] = v < box.lower()[i] ? box.lower()[i] : (v > box.upper()[i] ? box.upper()[i] : v);
    }
    return out;
}

BoxSchedule::BoxSchedule(Box terminal) : terminal_(std::move(terminal)) {}

BoxSchedule::BoxSchedule(std::vector<Box> prefix, Box terminal)
    : prefix_(std::move(prefix)), terminal_(std::move(terminal)) {
    for (const auto& b : prefix_) {
        if (b.dim() != terminal_.dim()) {
            throw DimensionError("BoxSchedule: boxes do not share a dimension");
        }
    }
}

NestingReport verify_nesting(const BoxSchedule& schedule) {
    NestingReport rep;
    const std::size_t len = schedule.prefix_size();
    for (std::size_t l = 0; l < len; ++l) {
        const Box& outer = schedule.prefix()[l];
        NestingWitness w{l, std::nullopt};
        if (outer.contains(schedule.terminal())) {
            // Walk back from the end of the prefix; the first box not inside
            // box l fixes the earliest admissible k.
            std::size_t k = l;
            for (std::size_t j = len; j-- > l + 1;) {
                if (!outer.contains(schedule.prefix()[j])) {
                    k = j;
                    break;
                }
            }
            w.k = k;
        } else if (!rep.first_violation) {
            rep.first_violation = l;
        }
        rep.witnesses.push_back(w);
    }
    rep.witnesses.push_back({len, len});
    return rep;
}

std::optional<Box> common_intersection(const BoxSchedule& schedule) {
    Vector lo = schedule.terminal().lower();
    Vector hi = schedule.terminal().upper();
    for (const auto& b : schedule.prefix()) {
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = std::max(lo[i], b.lower()[i]);
            hi[i] = std::min(hi[i], b.upper()[i]);
        }
    }
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) return std::nullopt;
    return Box(std::move(lo), std::move(hi));
}

double inclusion_inequality_check(const Box& outer, const Box& inner, std::size_t samples,
                                  std::uint64_t seed) {
    if (!outer.contains(inner)) {
        throw PreconditionError("inclusion_inequality_check: inner box is not inside outer box");
    }
    const std::size_t n = outer.dim();
    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        Vector z(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double width = outer.upper()[i] - outer.lower()[i] + 1.0;
            z[i] = rng.uniform(outer.lower()[i] - width, outer.upper()[i] + width);
            y[i] = rng.uniform(inner.lower()[i], inner.upper()[i]);
        }
        const double lhs = norm2(box_project(inner, z) - y);
        const double rhs = norm2(box_project(outer, z) - y);
        worst = std::max(worst, lhs - rhs);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Smoothing matrices

SmoothingMatrix smoothing_validate(const Matrix& s) {
    const std::size_t n = s.rows();
    if (s.cols() != n) throw DimensionError("smoothing: matrix must be square");
    if (!all_finite(s)) throw PreconditionError("smoothing: entries must be finite");

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(s(i, j) - s(j, i)) > 1e-10) {
                throw PreconditionError("smoothing: matrix is not symmetric at (" +
                                        std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
    Matrix clean = s;
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double& v = clean(i, j);
            if (v < -1e-14) {
                throw PreconditionError("smoothing: matrix is not stochastic, entry (" +
                                        std::to_string(i) + ", " + std::to_string(j) +
                                        ") is negative");
            }
            if (v < 0.0) v = 0.0;
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-10) {
            throw PreconditionError("smoothing: matrix is not stochastic, row " +
                                    std::to_string(i) + " does not sum to 1");
        }
        if (!(clean(i, i) > 0.0)) {
            throw PreconditionError("smoothing: diagonal entry " + std::to_string(i) +
                                    " is not positive");
        }
    }

    const auto eig = symmetric_eigen(clean);
    SmoothingMatrix out;
    out.s_ = std::move(clean);
    out.eigenvalues_ = eig.values;
    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = eig.values[k];
        if (lambda > 1.0 + 1e-10 || lambda <= -1.0 + 1e-8) {
            std::ostringstream os;
            os.precision(17);
            os << "smoothing: eigenvalue " << lambda << " outside (-1, 1]";
            throw PreconditionError(os.str());
        }
        if (lambda >= 1.0 - 1e-9) {
            Vector v = eig.vectors.column(k);
            if (norm2(out.s_ * v - v) > 1e-9) {
                throw PreconditionError("smoothing: unit-eigenvalue eigenvector is not fixed");
            }
            out.fixed_basis_.push_back(std::move(v));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Strict nonexpansivity sampling

SneReport sne_sample_check(const VectorMap& op, std::size_t dim, std::size_t samples,
                           std::uint64_t seed, const PairGenerator& equality_pairs,
                           double radius) {
    if (samples == 0) throw PreconditionError("sne_sample_check: samples must be >= 1");
    SneReport rep;
    rep.max_expansion = -std::numeric_limits<double>::infinity();
    Rng rng(seed);
    bool ok = true;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector x = rng.vector(dim, -radius, radius);
        const Vector y = rng.vector(dim, -radius, radius);
        const double e = norm2(op(x) - op(y)) - norm2(x - y);
        rep.max_expansion = std::max(rep.max_expansion, e);
        ok = ok && e <= 1e-12;
    }
    if (equality_pairs) {
        for (std::size_t s = 0; s < samples; ++s) {
            const auto [x, y] = equality_pairs(rng);
            const double d = norm2((op(x) - op(y)) - (x - y));
            rep.max_equality_defect = std::max(rep.max_equality_defect, d);
            ok = ok && d <= 1e-10;
            ++rep.equality_pairs;
        }
    }
    rep.passed = ok;
    return rep;
}

SneReport sne_sample_check(const Box& box, std::size_t samples, std::uint64_t seed) {
    const std::size_t n = box.dim();
    double radius = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        radius = std::max({radius, 2.0 * std::abs(box.lower()[i]), 2.0 * std::abs(box.upper()[i])});
    }
    auto inside = [box](Rng& rng) {
        Vector x(box.dim()), y(box.dim());
        for (std::size_t i = 0; i < box.dim(); ++i) {
            x[i] = rng.uniform(box.lower()[i], box.upper()[i]);
            y[i] = rng.uniform(box.lower()[i], box.upper()[i]);
        }
        return std::pair{x, y};
    };
    return sne_sample_check([&box](const Vector& x) { return box_project(box, x); }, n, samples,
                            seed, inside, radius);
}

SneReport sne_sample_check(const SmoothingMatrix& s, std::size_t samples, std::uint64_t seed) {
    PairGenerator eq;
    if (!s.fixed_basis().empty()) {
        eq = [&s](Rng& rng) {
            const Vector x = rng.vector(s.dim(), -2.0, 2.0);
            Vector d(s.dim());
            for (const auto& v : s.fixed_basis()) d = d + rng.uniform(-2.0, 2.0) * v;
            return std::pair{x, x - d};
        };
    }
    return sne_sample_check([&s](const Vector& x) { return s.apply(x); }, s.dim(), samples, seed,
                            eq);
}

bool vstar_membership(const Vector& z, const Box& box, const LlsInstance& instance,
                      const Vector& delta, double tol) {
    if (z.size() != box.dim() || delta.size() != box.dim() || instance.cols() != box.dim()) {
        throw DimensionError("vstar_membership: dimension mismatch");
    }
    if (!box.contains(z)) return false;
    return instance.lss_residual(z - delta) <= tol * (1.0 + norm2(instance.b()));
}

}  // namespace fca
