#include "whitham/io.hpp"

#include "whitham/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace whitham {

namespace {

constexpr char magic[8] = {'W', 'B', 'S', 'N', 'A', 'P', '0', '1'};
constexpr std::size_t header_size = 8 + 2 * 8 + 4 * 8;

void put_u64(std::string& out, std::uint64_t x) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 8;
    return x;
}

double get_f64(const std::string& in, std::size_t& pos) { return std::bit_cast<double>(get_u64(in, pos)); }

}  // namespace

std::size_t snapshot_size(int dim, std::size_t n) {
    std::size_t points = 1;
    for (int i = 0; i < dim; ++i) points *= n;
    return header_size + 8 * points * static_cast<std::size_t>(1 + dim);
}

void write_snapshot(const std::string& path, const State& state, double mu, double epsilon) {
    if (!state.all_finite()) throw SnapshotError(SnapshotErrorKind::non_finite, "refusing to write a non-finite state");
    const auto& g = state.grid();
    std::string out(magic, magic + 8);
    out.reserve(snapshot_size(g.dim(), g.points_per_dim()));
    put_u64(out, static_cast<std::uint64_t>(g.dim()));
    put_u64(out, g.points_per_dim());
    put_f64(out, g.length());
    put_f64(out, state.time);
    put_f64(out, mu);
    put_f64(out, epsilon);
    for (double x : state.zeta.values()) put_f64(out, x);
    for (const auto& c : state.v)
        for (double x : c.values()) put_f64(out, x);
    try {
        write_file_atomic(path, out);
    } catch (const std::exception& e) {
        throw SnapshotError(SnapshotErrorKind::io, e.what());
    }
}

Snapshot read_snapshot(const std::string& path) {
    std::string in;
    try {
        in = read_file(path);
    } catch (const std::exception& e) {
        throw SnapshotError(SnapshotErrorKind::io, e.what());
    }
    if (in.size() < 8 || in.compare(0, 8, std::string(magic, 8)) != 0)
        throw SnapshotError(SnapshotErrorKind::bad_magic, path + ": not a WBSNAP01 snapshot");
    if (in.size() < header_size) throw SnapshotError(SnapshotErrorKind::truncated_payload, path + ": truncated header");
    std::size_t pos = 8;
    const std::uint64_t dim = get_u64(in, pos);
    const std::uint64_t n = get_u64(in, pos);
    const double length = get_f64(in, pos);
    const double time = get_f64(in, pos);
    const double mu = get_f64(in, pos);
    const double epsilon = get_f64(in, pos);
    if ((dim != 1 && dim != 2) || n < 2 || n > (1u << 16))
        throw SnapshotError(SnapshotErrorKind::bad_magic, path + ": unsupported grid in header");
    const std::size_t expected = snapshot_size(static_cast<int>(dim), n);
    if (in.size() < expected) throw SnapshotError(SnapshotErrorKind::truncated_payload, path + ": truncated payload");
    if (in.size() > expected) throw SnapshotError(SnapshotErrorKind::truncated_payload, path + ": trailing bytes");

    const GridPtr grid = make_grid(static_cast<int>(dim), n, length);
    State state(grid);
    state.time = time;
    for (double& x : state.zeta.values()) x = get_f64(in, pos);
    for (auto& c : state.v)
        for (double& x : c.values()) x = get_f64(in, pos);
    if (!state.all_finite() || !std::isfinite(time) || !std::isfinite(mu) || !std::isfinite(epsilon))
        throw SnapshotError(SnapshotErrorKind::non_finite, path + ": non-finite values");
    return {std::move(state), mu, epsilon};
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string diagnostics_csv(const std::vector<EnergyReport>& reports) {
    std::string out = csv_header;
    out += '\n';
    for (const auto& r : reports) {
        const double row[] = {r.time,     r.x_norm_0,  r.x_norm_t0, r.x_norm_t0p1, r.x_norm_s,
                              r.y_norm_0, r.quad_form, r.min_depth, r.max_velocity};
        for (std::size_t i = 0; i < std::size(row); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_diagnostics_csv(const std::string& path, const std::vector<EnergyReport>& reports) {
    write_file_atomic(path, diagnostics_csv(reports));
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!f) throw std::runtime_error("write to " + tmp + " failed");
    }
    std::filesystem::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_failed_marker(const std::string& dir, const std::string& reason) {
    write_file_atomic((std::filesystem::path(dir) / ".failed").string(), reason + "\n");
}

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

CsvTable CsvTable::parse(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        return cells;
    };
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.columns = split(line);
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line)) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw std::invalid_argument("CSV line " + std::to_string(number) + ": bad number '" + cell + "'");
            }
        }
        if (row.size() != t.columns.size())
            throw std::invalid_argument("CSV line " + std::to_string(number) + ": wrong number of cells");
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::invalid_argument("unknown column '" + name + "'");
}

}  // namespace whitham
