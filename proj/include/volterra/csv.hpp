#pragma once

// GridFunction <-> CSV. Header `t,x_1,...,x_n`, one row per node, `%.17g`, LF.

#include "volterra/function_space.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace volterra {

/// Raw sampled table read from CSV; `t` strictly increasing.
struct SampledTable {
    std::size_t dim = 0;
    std::vector<double> t;
    std::vector<double> values;  // row-major, t.size() * dim
};

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, std::size_t row) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    while (used < s.size() && (s[used] == ' ' || s[used] == '\r')) ++used;
    if (used != s.size() || s.empty()) {
        throw Error(ErrorKind::IoError, "row " + std::to_string(row) + ": not a number: '" + s + "'");
    }
    return v;
}

}  // namespace detail

inline void write_csv(std::ostream& out, const GridFunction& x) {
    out << 't';
    for (std::size_t k = 0; k < x.dim(); ++k) out << ",x_" << (k + 1);
    out << '\n';
    for (std::size_t i = 0; i < x.n_nodes(); ++i) {
        out << detail::format_double(x.grid().node(i));
        for (std::size_t k = 0; k < x.dim(); ++k) out << ',' << detail::format_double(x(i, k));
        out << '\n';
    }
}

inline void write_csv(const std::string& path, const GridFunction& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    write_csv(out, x);
    if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

[[nodiscard]] inline SampledTable read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = detail::split_commas(line);
    if (header.size() < 2 || header[0] != "t") throw Error(ErrorKind::IoError, "header must be t,x_1,...,x_n");
    for (std::size_t k = 1; k < header.size(); ++k) {
        if (header[k] != "x_" + std::to_string(k)) {
            throw Error(ErrorKind::IoError, "unexpected column '" + header[k] + "'");
        }
    }
    SampledTable table;
    table.dim = header.size() - 1;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != header.size()) {
            throw Error(ErrorKind::IoError, "row " + std::to_string(row) + ": wrong column count");
        }
        const double t = detail::parse_double(cells[0], row);
        if (!table.t.empty() && !(t > table.t.back())) {
            throw Error(ErrorKind::IoError, "row " + std::to_string(row) + ": t not strictly increasing");
        }
        table.t.push_back(t);
        for (std::size_t k = 1; k < cells.size(); ++k) table.values.push_back(detail::parse_double(cells[k], row));
    }
    if (table.t.size() < 2) throw Error(ErrorKind::IoError, "CSV needs at least two rows");
    return table;
}

[[nodiscard]] inline SampledTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    return read_csv(in);
}

/// Piecewise-linear resampling of a table onto `grid`. The table must cover
/// [alpha, beta] (up to 1e-12 relative) and vanish at alpha.
[[nodiscard]] inline GridFunction resample(const SampledTable& table, const Grid& grid) {
    const double slack = 1e-12 * grid.length();
    if (table.t.front() > grid.alpha() + slack || table.t.back() < grid.beta() - slack) {
        throw Error(ErrorKind::GridMismatch, "CSV samples do not cover [alpha, beta]");
    }
    const std::size_t dim = table.dim;
    auto interp = [&](double t) {
        Vec v(static_cast<Eigen::Index>(dim));
        auto it = std::upper_bound(table.t.begin(), table.t.end(), t);
        std::size_t hi = static_cast<std::size_t>(it - table.t.begin());
        hi = std::clamp<std::size_t>(hi, 1, table.t.size() - 1);
        const std::size_t lo = hi - 1;
        const double w = std::clamp((t - table.t[lo]) / (table.t[hi] - table.t[lo]), 0.0, 1.0);
        for (std::size_t k = 0; k < dim; ++k) {
            v[static_cast<Eigen::Index>(k)] =
                (1.0 - w) * table.values[lo * dim + k] + w * table.values[hi * dim + k];
        }
        return v;
    };
    const Vec v0 = interp(grid.alpha());
    if (!(v0.norm() <= kAnchorTolerance)) {
        throw Error(ErrorKind::NotAnchoredAtAlpha, "CSV value at alpha is " + std::to_string(v0.norm()));
    }
    return tabulate(grid, dim, [&](std::size_t i) { return interp(grid.node(i)); });
}

}  // namespace volterra
