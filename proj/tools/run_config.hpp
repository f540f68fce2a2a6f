#pragma once

// Settings shared by the solve, verify and delta subcommands. A JSON config
// file supplies any subset of the fields; command-line flags override it.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fca/affine_operators.hpp"
#include "fca/constraints.hpp"
#include "fca/instance.hpp"
#include "fca/solver.hpp"

namespace fca::cli {

struct RunConfig {
    std::string method = "landweber";  // kaczmarz | cimmino | landweber | dw | custom
    double relaxation = 1.0;           // kaczmarz
    std::vector<double> omegas;        // landweber schedule; first entry is omega for cimmino/dw
    std::optional<double> epsilon;     // landweber bound margin
    std::optional<std::filesystem::path> weights;   // cimmino row weights
    std::optional<std::filesystem::path> diagonal;  // dw diagonal
    std::optional<std::filesystem::path> t_matrix;  // custom
    std::optional<std::filesystem::path> r_matrix;  // custom

    std::string constraint = "none";  // none | box | smoothing
    std::optional<std::filesystem::path> schedule;
    std::optional<std::filesystem::path> smoothing;

    std::size_t max_iter = 100000;
    double step_tol = 1e-10;
    double residual_tol = 1e-13;
    std::size_t stride = 10;
    bool monitor_fejer = true;
    std::vector<std::size_t> probes;

    std::optional<std::filesystem::path> matrix;
    std::optional<std::filesystem::path> rhs;
    std::optional<std::filesystem::path> x0;
    std::optional<std::filesystem::path> reference;
    std::optional<std::filesystem::path> truth;
    std::filesystem::path output = "fca_out";

    std::size_t samples = 64;
    std::uint64_t seed = kDefaultSampleSeed;
};

// Parses a flat JSON object whose keys are the RunConfig field names.
// Relative paths are taken relative to the config file's directory. Unknown
// keys and mistyped values raise IoError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::string& name,
                           const std::filesystem::path& base_dir);

// Loaded problem pieces; every file read goes through fca::io.
LlsInstance load_instance(const RunConfig& cfg);
OperatorSchedule build_schedule(const RunConfig& cfg, const Matrix& a);

}  // namespace fca::cli
