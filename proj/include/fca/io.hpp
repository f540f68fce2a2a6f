#pragma once

// File formats: Matrix Market for matrices, one value per line for vectors,
// JSON for box schedules and CSV for run traces. Doubles are written in the
// shortest form that reads back to the same bits.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "fca/constraints.hpp"
#include "fca/linalg.hpp"
#include "fca/solver.hpp"

namespace fca::io {

std::string format_double(double v);
// Whole-token parse; throws IoError mentioning `where` on failure.
double parse_double(std::string_view token, const std::string& where);

enum class MatrixFormat { array, coordinate };

// Reads "%%MatrixMarket matrix {array|coordinate} {real|integer} general".
// Errors name the file and line.
Matrix read_matrix_market(const std::filesystem::path& path);
Matrix parse_matrix_market(std::istream& in, const std::string& name);
void write_matrix_market(const std::filesystem::path& path, const Matrix& a,
                         MatrixFormat format = MatrixFormat::array);
void write_matrix_market(std::ostream& out, const Matrix& a,
                         MatrixFormat format = MatrixFormat::array);

// One value per line; blank lines and lines starting with '#' are skipped.
Vector read_vector(const std::filesystem::path& path);
Vector parse_vector(std::istream& in, const std::string& name);
void write_vector(const std::filesystem::path& path, const Vector& x);
void write_vector(std::ostream& out, const Vector& x);

// {"dimension": n,
//  "boxes": [{"lower": [...] | scalar, "upper": [...] | scalar, "repeat": r}, ...],
//  "terminal": {"lower": ..., "upper": ...}}
// "boxes" is the explicit prefix, each entry standing for `repeat` (default 1)
// consecutive indices. The writer collapses equal neighbours the same way.
BoxSchedule read_box_schedule(const std::filesystem::path& path);
BoxSchedule parse_box_schedule(const std::string& text, const std::string& name);
std::string box_schedule_json(const BoxSchedule& schedule);
void write_box_schedule(const std::filesystem::path& path, const BoxSchedule& schedule);

// Columns k,residual,step_norm,fejer_distance,condition1_defect,box_index with
// empty cells for inactive monitors.
void write_trace_csv(std::ostream& out, const RunTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);
std::string trace_csv(const RunTrace& trace);

// Whole file as a string; IoError if it cannot be opened.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fca::io
