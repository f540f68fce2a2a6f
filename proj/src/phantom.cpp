#include "fca/phantom.hpp"

#include <algorithm>
#include <numeric>

#include "fca/error.hpp"
#include "fca/random.hpp"

namespace fca {

std::string to_string(RayFamily f) {
    switch (f) {
        case RayFamily::rows: return "rows";
        case RayFamily::cols: return "cols";
        case RayFamily::diag: return "diag";
        case RayFamily::anti_diag: return "anti-diag";
    }
    return "unknown";
}

RayFamily parse_ray_family(const std::string& name) {
    if (name == "rows") return RayFamily::rows;
    if (name == "cols") return RayFamily::cols;
    if (name == "diag") return RayFamily::diag;
    if (name == "anti-diag" || name == "anti_diag") return RayFamily::anti_diag;
    throw PreconditionError("unknown ray family '" + name +
                            "' (expected rows, cols, diag or anti-diag)");
}

void validate(const PhantomSpec& spec) {
    if (spec.grid < 2) throw PreconditionError("phantom: grid must be at least 2");
    if (spec.particles < 1 || spec.particles > spec.grid * spec.grid) {
        throw PreconditionError("phantom: particle count must lie in [1, g^2]");
    }
    if (spec.families.empty()) throw PreconditionError("phantom: no ray family selected");
    for (std::size_t i = 0; i < spec.families.size(); ++i)
        for (std::size_t j = i + 1; j < spec.families.size(); ++j)
            if (spec.families[i] == spec.families[j]) {
                throw PreconditionError("phantom: ray family " + to_string(spec.families[i]) +
                                        " listed twice");
            }
}

Matrix ray_matrix(std::size_t grid, const std::vector<RayFamily>& families) {
    const std::size_t g = grid;
    std::size_t rays = 0;
    for (auto f : families) rays += (f == RayFamily::rows || f == RayFamily::cols) ? g : 2 * g - 1;
    Matrix a(rays, g * g);
    std::size_t base = 0;
    for (auto f : families) {
        for (std::size_t r = 0; r < g; ++r) {
            for (std::size_t c = 0; c < g; ++c) {
                std::size_t ray = 0;
                switch (f) {
                    case RayFamily::rows: ray = r; break;
                    case RayFamily::cols: ray = c; break;
                    case RayFamily::diag: ray = r + (g - 1) - c; break;
                    case RayFamily::anti_diag: ray = r + c; break;
                }
                a(base + ray, r * g + c) = 1.0;
            }
        }
        base += (f == RayFamily::rows || f == RayFamily::cols) ? g : 2 * g - 1;
    }
    return a;
}

Phantom generate(const PhantomSpec& spec) {
    validate(spec);
    const std::size_t n = spec.grid * spec.grid;

    // Partial Fisher-Yates: the first p slots become the particle pixels.
    std::vector<std::size_t> pixels(n);
    std::iota(pixels.begin(), pixels.end(), 0);
    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.particles; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.index(n - i));
        std::swap(pixels[i], pixels[j]);
    }
    pixels.resize(spec.particles);
    std::sort(pixels.begin(), pixels.end());

    Vector truth(n);
    for (std::size_t p : pixels) truth[p] = 1.0;
    Matrix a = ray_matrix(spec.grid, spec.families);
    Vector b = a * truth;
    return Phantom{LlsInstance(std::move(a), std::move(b), truth), truth, std::move(pixels)};
}

BoxSchedule fixed_box_schedule(std::size_t n) {
    if (n == 0) throw PreconditionError("fixed_box_schedule: dimension must be at least 1");
    return BoxSchedule(Box::uniform(n, 0.0, 1.0));
}

void validate(const AdaptiveBoxPolicy& policy) {
    if (!(policy.theta_lo > 0.0 && policy.theta_lo < policy.theta_hi && policy.theta_hi < 1.0)) {
        throw PreconditionError("adaptive policy: need 0 < theta_lo < theta_hi < 1");
    }
    if (!(policy.shrink_width > 0.0 && policy.shrink_width < 0.5)) {
        throw PreconditionError("adaptive policy: shrink width must lie in (0, 0.5)");
    }
    if (policy.trigger_iterations.empty()) {
        throw PreconditionError("adaptive policy: at least one trigger iteration is required");
    }
    for (std::size_t i = 1; i < policy.trigger_iterations.size(); ++i) {
        if (policy.trigger_iterations[i] <= policy.trigger_iterations[i - 1]) {
            throw PreconditionError("adaptive policy: trigger iterations must strictly increase");
        }
    }
}

AdaptiveSchedule adaptive_box_schedule(const AdaptiveBoxPolicy& policy, const RunTrace& probe_run,
                                       const std::optional<Vector>& truth) {
    validate(policy);
    if (probe_run.iterates.empty()) throw PreconditionError("adaptive_box_schedule: empty probe run");
    const std::size_t n = probe_run.iterates.front().x.size();
    if (truth && truth->size() != n) throw DimensionError("adaptive_box_schedule: truth dimension");

    AdaptiveSchedule out{fixed_box_schedule(n), {}, {}};
    Vector lo(n, 0.0), hi(n, 1.0);
    std::vector<Box> stages;
    const double d = policy.shrink_width;

    for (std::size_t t : policy.trigger_iterations) {
        const StoredIterate* probe = &probe_run.iterates.front();
        for (const auto& it : probe_run.iterates)
            if (it.k <= t) probe = &it;
        out.probe_indices.push_back(probe->k);

        for (std::size_t i = 0; i < n; ++i) {
            const double v = probe->x[i];
            double plo = 0.0, phi = 1.0;
            if (v > policy.theta_hi) {
                plo = 1.0 - d;
            } else if (v < policy.theta_lo) {
                phi = d;
            }
            double nlo = std::max(lo[i], plo);
            double nhi = std::min(hi[i], phi);
            if (nlo > nhi) {
                nlo = lo[i];
                nhi = hi[i];
            }
            if (truth) {
                const double tv = (*truth)[i];
                if (tv < nlo || tv > nhi) {
                    out.guard_events.push_back({t, i, nlo, nhi, tv});
                    nlo = std::min(nlo, tv);
                    nhi = std::max(nhi, tv);
                }
            }
            // Widening never leaves the previous stage, which already held the truth.
            lo[i] = nlo;
            hi[i] = nhi;
        }
        stages.emplace_back(lo, hi);
    }

    // Expand the stages into per-iteration boxes; the last stage is terminal.
    std::vector<Box> prefix;
    const std::size_t last = policy.trigger_iterations.back();
    prefix.reserve(last);
    std::size_t stage = 0;
    const Box unit = Box::uniform(n, 0.0, 1.0);
    for (std::size_t k = 0; k < last; ++k) {
        while (stage < policy.trigger_iterations.size() && policy.trigger_iterations[stage] <= k) {
            ++stage;
        }
        prefix.push_back(stage == 0 ? unit : stages[stage - 1]);
    }
    out.schedule = BoxSchedule(std::move(prefix), stages.back());
    return out;
}

std::size_t ghost_count(const Vector& x, const Vector& truth, double threshold) {
    if (x.size() != truth.size()) throw DimensionError("ghost_count: dimension mismatch");
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw PreconditionError("ghost_count: threshold must lie in (0, 1)");
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if ((x[i] >= threshold) != (truth[i] == 1.0)) ++count;
    }
    return count;
}

}  // namespace fca
