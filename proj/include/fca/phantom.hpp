#pragma once

// Binary particle phantoms on a g x g pixel grid, measured by straight rays
// along rows, columns and both diagonals, and the box schedules used to push a
// reconstruction toward a 0/1 image.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fca/constraints.hpp"
#include "fca/instance.hpp"
#include "fca/linalg.hpp"
#include "fca/solver.hpp"

namespace fca {

enum class RayFamily { rows, cols, diag, anti_diag };

std::string to_string(RayFamily f);
// Accepts "rows", "cols", "diag" and "anti-diag"; throws PreconditionError.
RayFamily parse_ray_family(const std::string& name);

struct PhantomSpec {
    std::size_t grid = 8;
    std::size_t particles = 6;
    std::uint64_t seed = 42;
    std::vector<RayFamily> families{RayFamily::rows, RayFamily::cols, RayFamily::diag,
                                    RayFamily::anti_diag};
};

// Throws PreconditionError unless g >= 2, 1 <= p <= g^2 and the family list
// is nonempty and free of repeats.
void validate(const PhantomSpec& spec);

// Pixel (r, c) is unknown r * g + c. Diagonal rays follow r - c = const and
// anti-diagonal rays r + c = const, each family ordered by that constant.
Matrix ray_matrix(std::size_t grid, const std::vector<RayFamily>& families);

struct Phantom {
    LlsInstance instance;  // truth attached, b = A truth
    Vector truth;
    std::vector<std::size_t> particle_pixels;  // ascending
};

Phantom generate(const PhantomSpec& spec);

// The single box [0, 1]^n, every index the terminal one.
BoxSchedule fixed_box_schedule(std::size_t n);

struct AdaptiveBoxPolicy {
    std::vector<std::size_t> trigger_iterations{50, 100, 200};
    double theta_hi = 0.8;
    double theta_lo = 0.2;
    double shrink_width = 0.05;
};

// Throws PreconditionError unless 0 < theta_lo < theta_hi < 1,
// 0 < shrink_width < 0.5 and the triggers are nonempty and strictly increasing.
void validate(const AdaptiveBoxPolicy& policy);

struct GuardEvent {
    std::size_t trigger = 0;    // iteration index of the stage
    std::size_t component = 0;
    double proposed_lower = 0.0;
    double proposed_upper = 0.0;
    double truth_value = 0.0;
};

struct AdaptiveSchedule {
    BoxSchedule schedule;
    std::vector<GuardEvent> guard_events;
    // Iterate index actually read from the probe run for each trigger.
    std::vector<std::size_t> probe_indices;
};

// Box k is [0, 1]^n for k below the first trigger; from trigger t on it is the
// stage box computed from the probe iterate x^t (the latest stored iterate at
// or before t), intersected with the previous stage. A component whose
// intersection would be empty keeps its previous interval. With a truth
// vector, any interval that would exclude the truth is widened to contain it
// and the event is recorded.
AdaptiveSchedule adaptive_box_schedule(const AdaptiveBoxPolicy& policy, const RunTrace& probe_run,
                                       const std::optional<Vector>& truth = std::nullopt);

// Number of pixels where (x_i >= threshold) disagrees with (truth_i == 1).
std::size_t ghost_count(const Vector& x, const Vector& truth, double threshold = 0.5);

}  // namespace fca
