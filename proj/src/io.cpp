#include "fca/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fca/error.hpp"

namespace fca::io {

namespace {

using json = nlohmann::json;

std::string location(const std::string& name, std::size_t line) {
    return name + ":" + std::to_string(line);
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::size_t parse_index(std::string_view token, const std::string& where) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw IoError(where + ": expected a nonnegative integer, got '" + std::string(token) + "'");
    }
    return v;
}

void flush_checked(std::ostream& out, const std::string& what) {
    out.flush();
    if (!out) throw IoError(what + ": write failed");
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw IoError("format_double: conversion failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view token, const std::string& where) {
    std::string_view t = token;
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw IoError(where + ": expected a real number, got '" + std::string(token) + "'");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Matrix Market

Matrix read_matrix_market(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_matrix_market(in, path.string());
}

Matrix parse_matrix_market(std::istream& in, const std::string& name) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw IoError(name + ": empty file");
    ++lineno;
    const auto head = split_ws(line);
    if (head.size() != 5 || lower(head[0]) != "%%matrixmarket" || lower(head[1]) != "matrix") {
        throw IoError(location(name, lineno) + ": missing '%%MatrixMarket matrix' header");
    }
    const std::string layout = lower(head[2]);
    const std::string field = lower(head[3]);
    const std::string symmetry = lower(head[4]);
    if (layout != "array" && layout != "coordinate") {
        throw IoError(location(name, lineno) + ": unsupported layout '" + std::string(head[2]) + "'");
    }
    if (field != "real" && field != "integer") {
        throw IoError(location(name, lineno) + ": unsupported field '" + std::string(head[3]) + "'");
    }
    if (symmetry != "general") {
        throw IoError(location(name, lineno) + ": unsupported symmetry '" + std::string(head[4]) +
                      "'");
    }

    // Skip comments to the size line.
    std::vector<std::string_view> size_tokens;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '%') continue;
        size_tokens = split_ws(line);
        if (!size_tokens.empty()) break;
    }
    const std::string size_where = location(name, lineno);
    const std::size_t expect = layout == "array" ? 2 : 3;
    if (size_tokens.size() != expect) throw IoError(size_where + ": malformed size line");
    const std::size_t rows = parse_index(size_tokens[0], size_where);
    const std::size_t cols = parse_index(size_tokens[1], size_where);
    if (rows == 0 || cols == 0) throw IoError(size_where + ": matrix dimensions must be positive");
    const std::size_t entries =
        layout == "array" ? rows * cols : parse_index(size_tokens[2], size_where);

    Matrix a(rows, cols);
    std::size_t read = 0;
    while (read < entries && std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '%') continue;
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        const std::string where = location(name, lineno);
        if (layout == "array") {
            if (tok.size() != 1) throw IoError(where + ": expected one value per line");
            // Column-major order.
            a(read % rows, read / rows) = parse_double(tok[0], where);
        } else {
            if (tok.size() != 3) throw IoError(where + ": expected 'row col value'");
            const std::size_t i = parse_index(tok[0], where);
            const std::size_t j = parse_index(tok[1], where);
            if (i < 1 || i > rows || j < 1 || j > cols) {
                throw IoError(where + ": entry index out of range");
            }
            a(i - 1, j - 1) += parse_double(tok[2], where);
        }
        ++read;
    }
    if (read < entries) {
        throw IoError(location(name, lineno) + ": expected " + std::to_string(entries) +
                      " entries, found " + std::to_string(read));
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '%') continue;
        if (!split_ws(line).empty()) throw IoError(location(name, lineno) + ": trailing data");
    }
    return a;
}

void write_matrix_market(std::ostream& out, const Matrix& a, MatrixFormat format) {
    if (format == MatrixFormat::array) {
        out << "%%MatrixMarket matrix array real general\n" << a.rows() << ' ' << a.cols() << '\n';
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t i = 0; i < a.rows(); ++i) out << format_double(a(i, j)) << '\n';
        return;
    }
    std::size_t nnz = 0;
    for (double v : a.values())
        if (v != 0.0) ++nnz;
    out << "%%MatrixMarket matrix coordinate real general\n"
        << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << format_double(a(i, j)) << '\n';
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& a, MatrixFormat format) {
    auto out = open_out(path);
    write_matrix_market(out, a, format);
    flush_checked(out, path.string());
}

// ---------------------------------------------------------------------------
// Vectors

Vector read_vector(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_vector(in, path.string());
}

Vector parse_vector(std::istream& in, const std::string& name) {
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0].front() == '#') continue;
        const std::string where = location(name, lineno);
        if (tok.size() != 1) throw IoError(where + ": expected one value per line");
        values.push_back(parse_double(tok[0], where));
    }
    if (values.empty()) throw IoError(name + ": no values");
    return Vector(std::move(values));
}

void write_vector(std::ostream& out, const Vector& x) {
    for (double v : x) out << format_double(v) << '\n';
}

void write_vector(const std::filesystem::path& path, const Vector& x) {
    auto out = open_out(path);
    write_vector(out, x);
    flush_checked(out, path.string());
}

// ---------------------------------------------------------------------------
// Box schedules

namespace {

Vector bound_from_json(const json& j, std::size_t dim, const std::string& where) {
    if (j.is_number()) return Vector(dim, j.get<double>());
    if (!j.is_array()) throw IoError(where + ": bound must be a number or an array");
    if (j.size() != dim) {
        throw IoError(where + ": bound has " + std::to_string(j.size()) + " entries, expected " +
                      std::to_string(dim));
    }
    Vector v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (!j[i].is_number()) throw IoError(where + ": non-numeric bound entry");
        v[i] = j[i].get<double>();
    }
    return v;
}

Box box_from_json(const json& j, std::size_t dim, const std::string& where) {
    if (!j.is_object() || !j.contains("lower") || !j.contains("upper")) {
        throw IoError(where + ": box needs 'lower' and 'upper'");
    }
    try {
        return Box(bound_from_json(j["lower"], dim, where + ".lower"),
                   bound_from_json(j["upper"], dim, where + ".upper"));
    } catch (const PreconditionError& e) {
        throw IoError(where + ": " + e.what());
    }
}

json bound_to_json(const Vector& v) {
    bool uniform = true;
    for (double x : v) uniform = uniform && x == v[0];
    if (uniform) return v[0];
    return json(v.values());
}

json box_to_json(const Box& b) {
    return json{{"lower", bound_to_json(b.lower())}, {"upper", bound_to_json(b.upper())}};
}

}  // namespace

BoxSchedule parse_box_schedule(const std::string& text, const std::string& name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(name + ": " + e.what());
    }
    if (!doc.is_object()) throw IoError(name + ": expected a JSON object");
    if (!doc.contains("dimension") || !doc["dimension"].is_number_unsigned()) {
        throw IoError(name + ": missing positive integer 'dimension'");
    }
    const auto dim = doc["dimension"].get<std::size_t>();
    if (dim == 0) throw IoError(name + ": dimension must be positive");
    if (!doc.contains("terminal")) throw IoError(name + ": missing 'terminal' box");

    std::vector<Box> prefix;
    if (doc.contains("boxes")) {
        const json& boxes = doc["boxes"];
        if (!boxes.is_array()) throw IoError(name + ": 'boxes' must be an array");
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            const std::string where = name + ": boxes[" + std::to_string(i) + "]";
            Box b = box_from_json(boxes[i], dim, where);
            std::size_t repeat = 1;
            if (boxes[i].contains("repeat")) {
                if (!boxes[i]["repeat"].is_number_unsigned() || boxes[i]["repeat"].get<std::size_t>() == 0) {
                    throw IoError(where + ": 'repeat' must be a positive integer");
                }
                repeat = boxes[i]["repeat"].get<std::size_t>();
            }
            for (std::size_t r = 0; r < repeat; ++r) prefix.push_back(b);
        }
    }
    return BoxSchedule(std::move(prefix), box_from_json(doc["terminal"], dim, name + ": terminal"));
}

BoxSchedule read_box_schedule(const std::filesystem::path& path) {
    return parse_box_schedule(read_text(path), path.string());
}

std::string box_schedule_json(const BoxSchedule& schedule) {
    json boxes = json::array();
    const auto& prefix = schedule.prefix();
    for (std::size_t i = 0; i < prefix.size();) {
        std::size_t j = i + 1;
        while (j < prefix.size() && prefix[j] == prefix[i]) ++j;
        json entry = box_to_json(prefix[i]);
        if (j - i > 1) entry["repeat"] = j - i;
        boxes.push_back(std::move(entry));
        i = j;
    }
    json doc{{"dimension", schedule.dim()},
             {"boxes", std::move(boxes)},
             {"terminal", box_to_json(schedule.terminal())}};
    return doc.dump(2) + "\n";
}

void write_box_schedule(const std::filesystem::path& path, const BoxSchedule& schedule) {
    write_text(path, box_schedule_json(schedule));
}

// ---------------------------------------------------------------------------
// Traces

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    auto cell = [&out](const std::optional<double>& v) {
        if (v) out << format_double(*v);
    };
    out << "k,residual,step_norm,fejer_distance,condition1_defect,box_index\n";
    for (const auto& r : trace.rows) {
        out << r.k << ',';
        cell(r.residual);
        out << ',';
        cell(r.step_norm);
        out << ',';
        cell(r.fejer_distance);
        out << ',';
        cell(r.condition1_defect);
        out << ',';
        if (r.box_index) out << *r.box_index;
        out << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace) {
    auto out = open_out(path);
    write_trace_csv(out, trace);
    flush_checked(out, path.string());
}

std::string trace_csv(const RunTrace& trace) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    return os.str();
}

std::string read_text(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    flush_checked(out, path.string());
}

}  // namespace fca::io
