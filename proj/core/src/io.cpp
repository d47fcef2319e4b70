#include "isosum/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <tuple>

#include "isosum/errors.hpp"

namespace isosum {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

double parse_double(const std::string& token, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw ArgumentError(where + ": cannot parse '" + token + "' as a real number");
    }
    if (used != token.size()) {
        throw ArgumentError(where + ": trailing characters in '" + token + "'");
    }
    return v;
}

}  // namespace

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    if (!a.shared_pattern()) {
        return;
    }
    const auto rp = a.pattern().row_ptr();
    const auto ci = a.pattern().col_idx();
    for (std::int64_t r = 0; r < a.rows(); ++r) {
        for (auto k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
            out << r + 1 << ' ' << ci[static_cast<std::size_t>(k)] + 1 << ' '
                << format_value(a.values()[static_cast<std::size_t>(k)]) << '\n';
        }
    }
}

void write_matrix_market(const SparseMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_matrix_market(a, out);
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
        throw ArgumentError("MatrixMarket: missing header line");
    }
    std::istringstream hdr(line);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || field != "real" || symmetry != "general") {
        throw ArgumentError("MatrixMarket: only 'matrix coordinate real general' is supported");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] != '%') {
            break;
        }
    }
    std::int64_t rows = 0, cols = 0, nnz = 0;
    {
        std::istringstream sz(line);
        if (!(sz >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
            throw ArgumentError("MatrixMarket: bad size line " + std::to_string(lineno));
        }
    }
    std::vector<std::tuple<std::int64_t, std::int64_t, double>> entries;
    entries.reserve(static_cast<std::size_t>(nnz));
    while (static_cast<std::int64_t>(entries.size()) < nnz && std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') {
            continue;
        }
        std::istringstream es(line);
        std::int64_t r = 0, c = 0;
        std::string val;
        if (!(es >> r >> c >> val) || r < 1 || r > rows || c < 1 || c > cols) {
            throw ArgumentError("MatrixMarket: bad entry on line " + std::to_string(lineno));
        }
        entries.emplace_back(r - 1, c - 1, parse_double(val, "MatrixMarket line " + std::to_string(lineno)));
    }
    if (static_cast<std::int64_t>(entries.size()) != nnz) {
        throw ArgumentError("MatrixMarket: expected " + std::to_string(nnz) + " entries");
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::vector<std::int64_t> row_ptr(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<std::int64_t> col_idx;
    std::vector<double> values;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto [r, c, v] = entries[k];
        if (k > 0 && std::get<0>(entries[k - 1]) == r && std::get<1>(entries[k - 1]) == c) {
            throw ArgumentError("MatrixMarket: duplicate entry (" + std::to_string(r + 1) + ", " +
                                std::to_string(c + 1) + ")");
        }
        ++row_ptr[static_cast<std::size_t>(r) + 1];
        col_idx.push_back(c);
        values.push_back(v);
    }
    for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r) {
        row_ptr[r + 1] += row_ptr[r];
    }
    auto pattern = std::make_shared<const SparsityPattern>(rows, cols, std::move(row_ptr), std::move(col_idx));
    return {std::move(pattern), std::move(values)};
}

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return read_matrix_market(in);
}

void write_vector(std::span<const double> v, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    for (const double x : v) {
        out << format_value(x) << '\n';
    }
}

std::vector<double> read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::vector<double> v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            continue;
        }
        const auto e = line.find_last_not_of(" \t\r");
        v.push_back(parse_double(line.substr(b, e - b + 1), path + ":" + std::to_string(lineno)));
    }
    return v;
}

}  // namespace isosum
