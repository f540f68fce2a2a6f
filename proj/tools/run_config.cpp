#include "run_config.hpp"

#include <nlohmann/json.hpp>

#include "fca/error.hpp"
#include "fca/io.hpp"

namespace fca::cli {

namespace {

using json = nlohmann::json;

template <class T>
T get_as(const json& doc, const std::string& key, const std::string& name) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw IoError(name + ": field '" + key + "' has the wrong type");
    }
}

std::size_t get_count(const json& doc, const std::string& key, const std::string& name) {
    if (!doc.at(key).is_number_unsigned()) {
        throw IoError(name + ": field '" + key + "' must be a nonnegative integer");
    }
    return doc.at(key).get<std::size_t>();
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& name,
                           const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(name + ": " + e.what());
    }
    if (!doc.is_object()) throw IoError(name + ": expected a JSON object");

    RunConfig cfg;
    auto path = [&](const std::string& key) {
        std::filesystem::path p = get_as<std::string>(doc, key, name);
        return p.is_relative() ? base_dir / p : p;
    };
    for (const auto& [key, value] : doc.items()) {
        if (key == "method") cfg.method = get_as<std::string>(doc, key, name);
        else if (key == "relaxation") cfg.relaxation = get_as<double>(doc, key, name);
        else if (key == "omegas" || key == "omega") {
            cfg.omegas = value.is_number() ? std::vector<double>{value.get<double>()}
                                           : get_as<std::vector<double>>(doc, key, name);
        } else if (key == "epsilon") cfg.epsilon = get_as<double>(doc, key, name);
        else if (key == "weights") cfg.weights = path(key);
        else if (key == "diagonal") cfg.diagonal = path(key);
        else if (key == "t_matrix") cfg.t_matrix = path(key);
        else if (key == "r_matrix") cfg.r_matrix = path(key);
        else if (key == "constraint") cfg.constraint = get_as<std::string>(doc, key, name);
        else if (key == "schedule") cfg.schedule = path(key);
        else if (key == "smoothing") cfg.smoothing = path(key);
        else if (key == "max_iter") cfg.max_iter = get_count(doc, key, name);
        else if (key == "step_tol") cfg.step_tol = get_as<double>(doc, key, name);
        else if (key == "residual_tol") cfg.residual_tol = get_as<double>(doc, key, name);
        else if (key == "stride") cfg.stride = get_count(doc, key, name);
        else if (key == "monitor_fejer") cfg.monitor_fejer = get_as<bool>(doc, key, name);
        else if (key == "probes") cfg.probes = get_as<std::vector<std::size_t>>(doc, key, name);
        else if (key == "matrix") cfg.matrix = path(key);
        else if (key == "rhs") cfg.rhs = path(key);
        else if (key == "x0") cfg.x0 = path(key);
        else if (key == "reference") cfg.reference = path(key);
        else if (key == "truth") cfg.truth = path(key);
        else if (key == "output") cfg.output = path(key);
        else if (key == "samples") cfg.samples = get_count(doc, key, name);
        else if (key == "seed") cfg.seed = get_as<std::uint64_t>(doc, key, name);
        else throw IoError(name + ": unknown field '" + key + "'");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(io::read_text(path), path.string(), path.parent_path());
}

LlsInstance load_instance(const RunConfig& cfg) {
    if (!cfg.matrix) throw PreconditionError("no matrix given (--matrix or \"matrix\")");
    Matrix a = io::read_matrix_market(*cfg.matrix);
    Vector b = cfg.rhs ? io::read_vector(*cfg.rhs) : Vector(a.rows());
    if (b.size() != a.rows()) {
        throw DimensionError("right-hand side has " + std::to_string(b.size()) +
                             " entries but the matrix has " + std::to_string(a.rows()) + " rows");
    }
    std::optional<Vector> truth;
    if (cfg.truth) truth = io::read_vector(*cfg.truth);
    return LlsInstance(std::move(a), std::move(b), std::move(truth));
}

OperatorSchedule build_schedule(const RunConfig& cfg, const Matrix& a) {
    const double omega = cfg.omegas.empty() ? 1.0 : cfg.omegas.front();
    if (cfg.method == "kaczmarz") return build_kaczmarz(a, cfg.relaxation);
    if (cfg.method == "cimmino") {
        return build_cimmino(a, omega, cfg.weights ? io::read_vector(*cfg.weights) : Vector{});
    }
    if (cfg.method == "dw") {
        if (!cfg.diagonal) throw PreconditionError("method dw needs a diagonal file (--diagonal)");
        return build_diagonal_weighting(a, io::read_vector(*cfg.diagonal), omega);
    }
    if (cfg.method == "landweber") {
        return build_landweber_schedule(a, cfg.omegas,
                                        cfg.epsilon ? *cfg.epsilon : default_landweber_epsilon(a));
    }
    if (cfg.method == "custom") {
        if (!cfg.t_matrix || !cfg.r_matrix) {
            throw PreconditionError("method custom needs --t-matrix and --r-matrix");
        }
        AffineOperator q{io::read_matrix_market(*cfg.t_matrix), io::read_matrix_market(*cfg.r_matrix),
                         "custom", {}};
        if (q.t.rows() != a.cols() || q.t.cols() != a.cols() || q.r.rows() != a.cols() ||
            q.r.cols() != a.rows()) {
            throw DimensionError("custom operator shapes do not match the matrix");
        }
        return q;
    }
    throw PreconditionError("unknown method '" + cfg.method +
                            "' (expected kaczmarz, cimmino, landweber, dw or custom)");
}

}  // namespace fca::cli
