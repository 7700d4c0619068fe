/// @file io.hpp
/// @brief Binary snapshots and diagnostics CSV files.
///
/// Snapshot layout (little endian): the 8 ASCII bytes "WBSNAP01", u64 dim,
/// u64 N, f64 L, f64 time, f64 mu, f64 epsilon, then zeta (N^dim f64,
/// row-major) followed by each velocity component in axis order.
#pragma once

#include "whitham/diagnostics.hpp"
#include "whitham/model.hpp"

#include <string>
#include <vector>

namespace whitham {

struct Snapshot {
    State state;
    double mu = 1.0;
    double epsilon = 0.0;
};

/// Throws SnapshotError(non_finite) for non-finite states, (io) on write failure.
void write_snapshot(const std::string& path, const State& state, double mu, double epsilon);
Snapshot read_snapshot(const std::string& path);
std::size_t snapshot_size(int dim, std::size_t n);

inline constexpr const char* csv_header =
    "time,x_norm_0,x_norm_t0,x_norm_t0p1,x_norm_s,y_norm_0,quad_form,min_depth,max_velocity";

/// Header plus one row per report, floats printed with 17 significant digits.
std::string diagnostics_csv(const std::vector<EnergyReport>& reports);
void write_diagnostics_csv(const std::string& path, const std::vector<EnergyReport>& reports);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

/// Creates <dir>/.failed holding `reason`.
void write_failed_marker(const std::string& dir, const std::string& reason);

/// Comma separated table with a header row.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::string to_string() const;
    static CsvTable parse(const std::string& text);
    /// Column index; throws std::invalid_argument naming unknown columns.
    std::size_t column(const std::string& name) const;
};

std::string format_double(double x);

}  // namespace whitham
