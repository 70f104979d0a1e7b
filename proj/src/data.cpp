#include "dpsvm/data.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dpsvm/error.hpp"

namespace dpsvm {

namespace {

void check_example(const Example& e) {
    if (e.y != 1 && e.y != -1) {
        throw LabelError("label must be -1 or +1, got " + std::to_string(e.y));
    }
    for (double v : e.x) {
        if (!std::isfinite(v)) throw ParameterError("example has a non-finite coordinate");
    }
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_real(const std::string& token, std::size_t row) {
    if (token.empty()) throw ParseError(row, "empty field");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ParseError(row, "not a finite real literal: '" + token + "'");
    }
    return v;
}

int parse_label(const std::string& token, std::size_t row) {
    if (token == "1" || token == "+1") return 1;
    if (token == "-1") return -1;
    throw LabelError("row " + std::to_string(row) + ": label must be -1 or +1, got '" + token + "'");
}

// Calls `on_row(fields, row_index)` for every non-blank data row.
template <typename F>
void for_each_row(std::istream& in, bool has_header, F&& on_row) {
    std::string line;
    bool header_pending = has_header;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (trim(line).empty()) continue;
        on_row(split_row(line), row);
        ++row;
    }
}

}  // namespace

Database::Database(std::vector<Example> entries) : entries_(std::move(entries)) {
    if (entries_.size() <= 1) {
        throw SizeError("database needs n > 1 entries, got " + std::to_string(entries_.size()));
    }
    dim_ = entries_.front().x.size();
    if (dim_ == 0) throw DimensionError("examples must have dimension >= 1");
    for (const auto& e : entries_) {
        if (e.x.size() != dim_) {
            throw DimensionError("all examples must share dimension " + std::to_string(dim_));
        }
        check_example(e);
    }
}

Database Database::rotated(std::size_t index) const {
    if (index >= size()) throw ParameterError("rotation index out of range");
    std::vector<Example> out;
    out.reserve(size());
    for (std::size_t k = 1; k <= size(); ++k) out.push_back(entries_[(index + k) % size()]);
    return Database(std::move(out));
}

DomainBox::DomainBox(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw DimensionError("box bounds differ in dimension");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i]) {
            throw ParameterError("box requires finite lower <= upper componentwise");
        }
    }
}

DomainBox DomainBox::cube(std::size_t dim, double half_width) {
    return DomainBox(std::vector<double>(dim, -half_width), std::vector<double>(dim, half_width));
}

double DomainBox::diameter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double w = upper[i] - lower[i];
        s += w * w;
    }
    return std::sqrt(s);
}

double DomainBox::max_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double m = std::max(std::abs(lower[i]), std::abs(upper[i]));
        s += m * m;
    }
    return std::sqrt(s);
}

double DomainBox::max_abs_coordinate() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        m = std::max({m, std::abs(lower[i]), std::abs(upper[i])});
    }
    return m;
}

bool DomainBox::contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (x[i] < lower[i] || x[i] > upper[i]) return false;
    }
    return true;
}

Database load_csv(std::istream& in, bool has_header) {
    std::vector<Example> entries;
    std::size_t width = 0;
    for_each_row(in, has_header, [&](const std::vector<std::string>& fields, std::size_t row) {
        if (fields.size() < 2) throw ParseError(row, "need at least one feature and a label");
        if (entries.empty()) {
            width = fields.size();
        } else if (fields.size() != width) {
            throw ParseError(row, "expected " + std::to_string(width) + " fields, got " +
                                      std::to_string(fields.size()));
        }
        Example e;
        e.x.reserve(width - 1);
        for (std::size_t j = 0; j + 1 < width; ++j) e.x.push_back(parse_real(fields[j], row));
        e.y = parse_label(fields.back(), row);
        entries.push_back(std::move(e));
    });
    return Database(std::move(entries));
}

std::vector<std::vector<double>> load_csv_points(std::istream& in, bool has_header, bool labeled) {
    std::vector<std::vector<double>> points;
    std::size_t width = 0;
    for_each_row(in, has_header, [&](const std::vector<std::string>& fields, std::size_t row) {
        if (points.empty()) {
            width = fields.size();
            if (width < (labeled ? 2u : 1u)) throw ParseError(row, "too few fields");
        } else if (fields.size() != width) {
            throw ParseError(row, "expected " + std::to_string(width) + " fields, got " +
                                      std::to_string(fields.size()));
        }
        const std::size_t d = labeled ? width - 1 : width;
        std::vector<double> x;
        x.reserve(d);
        for (std::size_t j = 0; j < d; ++j) x.push_back(parse_real(fields[j], row));
        if (labeled) parse_label(fields.back(), row);
        points.push_back(std::move(x));
    });
    return points;
}

void write_csv(std::ostream& out, const Database& db) {
    char buf[40];
    for (const auto& e : db) {
        for (double v : e.x) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ',';
        }
        out << (e.y > 0 ? "+1" : "-1") << '\n';
    }
}

Database neighbor_replace_last(const Database& db, const Example& replacement) {
    if (replacement.x.size() != db.dim()) {
        throw DimensionError("replacement has dimension " + std::to_string(replacement.x.size()) +
                             ", database has " + std::to_string(db.dim()));
    }
    std::vector<Example> entries = db.entries();
    entries.back() = replacement;
    return Database(std::move(entries));
}

DomainBox bounding_box(const Database& db, double margin) {
    if (!(margin >= 0.0) || !std::isfinite(margin)) throw ParameterError("margin must be >= 0");
    std::vector<double> lo = db[0].x;
    std::vector<double> hi = db[0].x;
    for (const auto& e : db) {
        for (std::size_t i = 0; i < db.dim(); ++i) {
            lo[i] = std::min(lo[i], e.x[i]);
            hi[i] = std::max(hi[i], e.x[i]);
        }
    }
    for (std::size_t i = 0; i < db.dim(); ++i) {
        lo[i] -= margin;
        hi[i] += margin;
    }
    return DomainBox(std::move(lo), std::move(hi));
}

}  // namespace dpsvm
