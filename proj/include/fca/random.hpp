#pragma once

#include <cstdint>
#include <random>

#include "fca/linalg.hpp"

namespace fca {

// Seeded generator whose draws depend only on the mt19937_64 bit stream, which
// the standard pins down exactly. The library distributions are avoided so
// fixtures and traces are reproducible across standard library vendors.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, bound), bound >= 1, by rejection.
    std::uint64_t index(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % bound;
    }

    Vector vector(std::size_t dim, double lo = -1.0, double hi = 1.0) {
        Vector v(dim);
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }

    Matrix matrix(std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0) {
        Matrix a(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (double& x : a.row(i)) x = uniform(lo, hi);
        return a;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace fca
