#include "sketchbench/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sketchbench/errors.hpp"

namespace sketchbench {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line_no) {
    T value{};
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && token.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(line_no, "cannot parse number '" + std::string(token) + "'");
    }
    return value;
}

/// Line reader that skips comments and blank lines and tracks 1-based line numbers.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next_data_line(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '%') continue;
            return true;
        }
        return false;
    }

    bool raw_line(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

struct Header {
    bool coordinate = false;
    bool symmetric = false;
};

Header parse_header(LineReader& reader) {
    std::string line;
    if (!reader.raw_line(line)) throw ParseError(1, "empty input, expected %%MatrixMarket header");
    const auto tokens = split_ws(line);
    if (tokens.size() != 5 || tokens[0] != "%%MatrixMarket") {
        throw ParseError(reader.line_no(), "expected '%%MatrixMarket matrix <format> real <symmetry>'");
    }
    if (lower(tokens[1]) != "matrix") throw ParseError(reader.line_no(), "unsupported object '" + std::string(tokens[1]) + "'");
    Header h;
    const auto format = lower(tokens[2]);
    if (format == "coordinate") {
        h.coordinate = true;
    } else if (format != "array") {
        throw ParseError(reader.line_no(), "unsupported format '" + std::string(tokens[2]) + "'");
    }
    if (lower(tokens[3]) != "real") throw ParseError(reader.line_no(), "unsupported field '" + std::string(tokens[3]) + "'");
    const auto symmetry = lower(tokens[4]);
    if (symmetry == "symmetric") {
        h.symmetric = true;
    } else if (symmetry != "general") {
        throw ParseError(reader.line_no(), "unsupported symmetry '" + std::string(tokens[4]) + "'");
    }
    return h;
}

SparseMatrixCSR read_coordinate(LineReader& reader, const Header& h) {
    std::string line;
    if (!reader.next_data_line(line)) throw ParseError(reader.line_no() + 1, "missing size line");
    const auto size_tokens = split_ws(line);
    if (size_tokens.size() != 3) throw ParseError(reader.line_no(), "coordinate size line needs 'rows cols nnz'");
    const auto rows = parse_number<std::int64_t>(size_tokens[0], reader.line_no());
    const auto cols = parse_number<std::int64_t>(size_tokens[1], reader.line_no());
    const auto nnz = parse_number<std::int64_t>(size_tokens[2], reader.line_no());
    if (rows < 0 || cols < 0 || nnz < 0) throw ParseError(reader.line_no(), "negative dimension");
    if (h.symmetric && rows != cols) throw ParseError(reader.line_no(), "symmetric matrix must be square");

    struct Entry {
        std::int64_t row, col;
        double value;
        std::size_t line;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(h.symmetric ? 2 * nnz : nnz));
    for (std::int64_t e = 0; e < nnz; ++e) {
        if (!reader.next_data_line(line)) {
            throw ParseError(reader.line_no() + 1, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(e));
        }
        const auto t = split_ws(line);
        if (t.size() != 3) throw ParseError(reader.line_no(), "coordinate entry needs 'row col value'");
        const auto i = parse_number<std::int64_t>(t[0], reader.line_no());
        const auto j = parse_number<std::int64_t>(t[1], reader.line_no());
        const auto v = parse_number<double>(t[2], reader.line_no());
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw ParseError(reader.line_no(), "index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of bounds");
        }
        if (!std::isfinite(v)) throw ParseError(reader.line_no(), "non-finite value");
        entries.push_back({i - 1, j - 1, v, reader.line_no()});
        if (h.symmetric && i != j) entries.push_back({j - 1, i - 1, v, reader.line_no()});
    }
    if (reader.next_data_line(line)) throw ParseError(reader.line_no(), "data beyond declared nnz");

    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
    triplets.reserve(entries.size());
    for (std::size_t p = 0; p < entries.size(); ++p) {
        if (p > 0 && entries[p].row == entries[p - 1].row && entries[p].col == entries[p - 1].col) {
            const std::size_t where = std::max(entries[p].line, entries[p - 1].line);
            throw ParseError(where, "duplicate entry (" + std::to_string(entries[p].row + 1) + ", " +
                                        std::to_string(entries[p].col + 1) + ")");
        }
        if (entries[p].value != 0.0) triplets.emplace_back(entries[p].row, entries[p].col, entries[p].value);
    }
    SparseMatrixCSR a(rows, cols);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    return a;
}

DenseMatrix read_array(LineReader& reader, const Header& h) {
    std::string line;
    if (!reader.next_data_line(line)) throw ParseError(reader.line_no() + 1, "missing size line");
    const auto size_tokens = split_ws(line);
    if (size_tokens.size() != 2) throw ParseError(reader.line_no(), "array size line needs 'rows cols'");
    const auto rows = parse_number<std::int64_t>(size_tokens[0], reader.line_no());
    const auto cols = parse_number<std::int64_t>(size_tokens[1], reader.line_no());
    if (rows < 0 || cols < 0) throw ParseError(reader.line_no(), "negative dimension");
    if (h.symmetric && rows != cols) throw ParseError(reader.line_no(), "symmetric matrix must be square");

    DenseMatrix a = DenseMatrix::Zero(rows, cols);
    auto read_value = [&]() {
        if (!reader.next_data_line(line)) throw ParseError(reader.line_no() + 1, "array data ended early");
        const auto t = split_ws(line);
        if (t.size() != 1) throw ParseError(reader.line_no(), "array entry needs exactly one value");
        const auto v = parse_number<double>(t[0], reader.line_no());
        if (!std::isfinite(v)) throw ParseError(reader.line_no(), "non-finite value");
        return v;
    };
    for (std::int64_t j = 0; j < cols; ++j) {
        for (std::int64_t i = h.symmetric ? j : 0; i < rows; ++i) {
            a(i, j) = read_value();
            if (h.symmetric) a(j, i) = a(i, j);
        }
    }
    if (reader.next_data_line(line)) throw ParseError(reader.line_no(), "data beyond declared size");
    return a;
}

void write_double(std::ostream& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, ptr - buf);
}

}  // namespace

AnyMatrix mm_read(std::istream& in) {
    LineReader reader(in);
    const Header h = parse_header(reader);
    if (h.coordinate) return read_coordinate(reader, h);
    return read_array(reader, h);
}

AnyMatrix mm_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open MatrixMarket file " + path.string());
    return mm_read(in);
}

void mm_write(const SparseMatrixCSR& a, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
        for (SparseMatrixCSR::InnerIterator it(a, r); it; ++it) {
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ';
            write_double(out, it.value());
            out << '\n';
        }
    }
    if (!out) throw std::runtime_error("mm_write: output stream failure");
}

void mm_write(const DenseMatrix& a, std::ostream& out) {
    out << "%%MatrixMarket matrix array real general\n";
    out << a.rows() << ' ' << a.cols() << '\n';
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            write_double(out, a(i, j));
            out << '\n';
        }
    }
    if (!out) throw std::runtime_error("mm_write: output stream failure");
}

void mm_write(const AnyMatrix& a, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    std::visit([&](const auto& m) { mm_write(m, out); }, a);
}

}  // namespace sketchbench
