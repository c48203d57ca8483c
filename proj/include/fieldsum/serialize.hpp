#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fieldsum/law.hpp"
#include "fieldsum/region.hpp"

namespace fieldsum {

// shortest decimal representation that parses back to the identical double
inline std::string format_double(double x) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
    return std::string(buffer, result.ptr);
}

inline double parse_double(const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw std::invalid_argument("not a number: '" + text + "'");
    return value;
}

inline std::int64_t parse_int(const std::string& text) {
    std::int64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw std::invalid_argument("not an integer: '" + text + "'");
    return value;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    parts.push_back(current);
    return parts;
}

// --- CSV ------------------------------------------------------------------------

using CsvCell = std::variant<std::int64_t, double, std::string>;

inline std::string csv_format(const CsvCell& cell) {
    if (std::holds_alternative<std::int64_t>(cell))
        return std::to_string(std::get<std::int64_t>(cell));
    if (std::holds_alternative<double>(cell)) return format_double(std::get<double>(cell));
    return std::get<std::string>(cell);
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    }

    void header(const std::vector<std::string>& names) { line(names); }

    void row(const std::vector<CsvCell>& cells) {
        std::vector<std::string> formatted;
        formatted.reserve(cells.size());
        for (const auto& cell : cells) formatted.push_back(csv_format(cell));
        line(formatted);
    }

private:
    void line(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

// --- region grammar ----------------------------------------------------------------
// empty:d=2 | quadrant:t1,...,td | box:l1,..,ld:u1,..,ud | cells:m=16:[(1,2),(3,3)]

inline std::string region_to_string(const Region& r) {
    std::ostringstream out;
    switch (r.kind) {
        case ShapeKind::empty:
            out << "empty:d=" << r.dim;
            break;
        case ShapeKind::quadrant: {
            out << "quadrant:";
            for (std::size_t j = 0; j < r.upper.size(); ++j)
                out << (j ? "," : "") << format_double(r.upper[j]);
            break;
        }
        case ShapeKind::box: {
            out << "box:";
            for (std::size_t j = 0; j < r.lower.size(); ++j)
                out << (j ? "," : "") << format_double(r.lower[j]);
            out << ':';
            for (std::size_t j = 0; j < r.upper.size(); ++j)
                out << (j ? "," : "") << format_double(r.upper[j]);
            break;
        }
        case ShapeKind::cell_union: {
            out << "cells:m=" << r.resolution << ":[";
            std::vector<std::int64_t> index;
            for (std::size_t c = 0; c < r.cells.size(); ++c) {
                unflatten(r.cells[c], r.dim, r.resolution, index);
                out << (c ? "," : "") << '(';
                for (std::size_t j = 0; j < index.size(); ++j)
                    out << (j ? "," : "") << index[j];
                out << ')';
            }
            out << ']';
            break;
        }
    }
    return out.str();
}

inline std::vector<double> parse_coordinates(const std::string& text) {
    std::vector<double> values;
    for (const auto& part : split(text, ',')) values.push_back(parse_double(part));
    return values;
}

inline Region parse_region(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
    if (kind == "empty") {
        if (rest.rfind("d=", 0) != 0)
            throw std::invalid_argument("empty region needs 'empty:d=<dim>': " + text);
        return regions::empty(static_cast<int>(parse_int(rest.substr(2))));
    }
    if (kind == "quadrant") return regions::quadrant(parse_coordinates(rest));
    if (kind == "box") {
        const auto parts = split(rest, ':');
        if (parts.size() != 2)
            throw std::invalid_argument("box region needs 'box:l1,..:u1,..': " + text);
        return regions::box(parse_coordinates(parts[0]), parse_coordinates(parts[1]));
    }
    if (kind == "cells") {
        const auto parts = split(rest, ':');
        if (parts.size() != 2 || parts[0].rfind("m=", 0) != 0)
            throw std::invalid_argument("cells region needs 'cells:m=<m>:[(i,..),...]': " + text);
        const std::int64_t m = parse_int(parts[0].substr(2));
        const std::string& body = parts[1];
        if (body.size() < 2 || body.front() != '[' || body.back() != ']')
            throw std::invalid_argument("cells region needs a [...] cell list: " + text);
        std::vector<std::vector<std::int64_t>> cells;
        std::vector<std::int64_t> current;
        std::string token;
        bool in_tuple = false;
        for (std::size_t i = 1; i + 1 < body.size(); ++i) {
            const char c = body[i];
            if (c == '(') {
                in_tuple = true;
                current.clear();
                token.clear();
            } else if (c == ')') {
                if (!in_tuple) throw std::invalid_argument("unbalanced cell tuple: " + text);
                current.push_back(parse_int(token));
                cells.push_back(current);
                in_tuple = false;
                token.clear();
            } else if (c == ',') {
                if (in_tuple) {
                    current.push_back(parse_int(token));
                    token.clear();
                }
            } else {
                token.push_back(c);
            }
        }
        if (cells.empty()) throw std::invalid_argument("cells region needs at least one cell: " + text);
        return regions::cell_union(static_cast<int>(cells.front().size()), m, cells);
    }
    throw std::invalid_argument("unknown region shape '" + kind + "' in '" + text + "'");
}

// --- law grammar ---------------------------------------------------------------------
// gaussian:<sigma2> | rademacher | pareto_tail:<alpha> | counterexample:<p>
// | md:<base law>:a=<a>:w=<w>

inline std::string law_to_string(const Law& law) {
    switch (law.kind) {
        case LawKind::gaussian:
            return "gaussian:" + format_double(law.sigma2);
        case LawKind::rademacher:
            return "rademacher";
        case LawKind::pareto_tail:
            return "pareto_tail:" + format_double(law.tail_alpha);
        case LawKind::counterexample_integer:
            return "counterexample:" + std::to_string(law.tail_p);
        case LawKind::md_bounded:
            return "md:" + law_to_string(*law.md_base) + ":a=" + format_double(law.md_amplitude) +
                   ":w=" + std::to_string(law.md_window);
    }
    throw std::logic_error("unreachable law kind");
}

inline Law parse_law(const std::string& text) {
    const auto parts = split(text, ':');
    const std::string& kind = parts[0];
    if (kind == "rademacher") {
        if (parts.size() != 1) throw std::invalid_argument("rademacher law takes no parameter");
        return laws::rademacher();
    }
    if (kind == "gaussian") {
        if (parts.size() != 2) throw std::invalid_argument("gaussian law needs 'gaussian:<sigma2>'");
        return laws::gaussian(parse_double(parts[1]));
    }
    if (kind == "pareto_tail") {
        if (parts.size() != 2)
            throw std::invalid_argument("pareto_tail law needs 'pareto_tail:<alpha>'");
        return laws::pareto_tail(parse_double(parts[1]));
    }
    if (kind == "counterexample") {
        if (parts.size() != 2)
            throw std::invalid_argument("counterexample law needs 'counterexample:<p>'");
        return laws::counterexample_integer(static_cast<int>(parse_int(parts[1])));
    }
    if (kind == "md") {
        if (parts.size() < 4 || parts[parts.size() - 2].rfind("a=", 0) != 0 ||
            parts.back().rfind("w=", 0) != 0)
            throw std::invalid_argument("md law needs 'md:<base>:a=<a>:w=<w>'");
        std::string base;
        for (std::size_t i = 1; i + 2 < parts.size(); ++i) {
            if (i > 1) base += ':';
            base += parts[i];
        }
        return laws::md_bounded(parse_law(base),
                                parse_double(parts[parts.size() - 2].substr(2)),
                                static_cast<int>(parse_int(parts.back().substr(2))));
    }
    throw std::invalid_argument("unknown law '" + kind + "' in '" + text + "'");
}

// --- artifact hashing ------------------------------------------------------------------

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string hash_hex(std::uint64_t hash) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

}  // namespace fieldsum
