#pragma once

// CSV readers and writers for datasets, profiles, coverage files, demand
// logs and bound curves. Every reader expects a header row; columns are
// matched by name and extra columns are ignored. Fields may be double-quoted
// with "" as the embedded quote.

#include "cbi/error.hpp"
#include "cbi/measures.hpp"
#include "cbi/operational.hpp"
#include "cbi/solver.hpp"
#include "cbi/verification.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cbi::io {

namespace detail {

[[nodiscard]] inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

[[nodiscard]] inline std::vector<std::string> split_row(std::string_view line, std::size_t line_no)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"' && trim(cur).empty()) {
            cur.clear();
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? cur : std::string(trim(cur)));
            cur.clear();
            was_quoted = false;
        } else {
            cur += c;
        }
    }
    if (quoted) {
        throw ParseError("unterminated quoted field", line_no);
    }
    fields.push_back(was_quoted ? cur : std::string(trim(cur)));
    return fields;
}

/// Rows of a CSV table with a header; blank lines are skipped.
class Table
{
public:
    Table(std::istream& in, const std::vector<std::string>& required)
    {
        std::string line;
        std::size_t line_no = 0;
        bool have_header = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) {
                continue;
            }
            auto fields = split_row(line, line_no);
            if (!have_header) {
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    columns_.emplace(fields[i], i);
                }
                for (const auto& name : required) {
                    if (columns_.count(name) == 0) {
                        throw ParseError("missing column '" + name + "' in header", line_no);
                    }
                }
                width_ = fields.size();
                have_header = true;
                continue;
            }
            if (fields.size() != width_) {
                throw ParseError("expected " + std::to_string(width_) + " fields, found " +
                                     std::to_string(fields.size()),
                                 line_no);
            }
            rows_.push_back({line_no, std::move(fields)});
        }
        if (!have_header) {
            throw ParseError("missing header row", line_no == 0 ? 1 : line_no);
        }
    }

    struct Row
    {
        std::size_t line = 0;
        std::vector<std::string> fields;
    };

    [[nodiscard]] const std::vector<Row>& rows() const noexcept { return rows_; }

    [[nodiscard]] const std::string& get(const Row& row, const std::string& column) const
    {
        return row.fields[columns_.at(column)];
    }

private:
    std::map<std::string, std::size_t> columns_;
    std::size_t width_ = 0;
    std::vector<Row> rows_;
};

[[nodiscard]] inline double parse_double(const std::string& s, std::size_t line, const char* what)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(std::string("invalid ") + what + " '" + s + "'", line);
    }
    return v;
}

[[nodiscard]] inline std::int64_t parse_int(const std::string& s, std::size_t line, const char* what)
{
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(std::string("invalid ") + what + " '" + s + "'", line);
    }
    return v;
}

[[nodiscard]] inline bool parse_flag(const std::string& s, std::size_t line, const char* what)
{
    if (s == "1" || s == "true") {
        return true;
    }
    if (s == "0" || s == "false") {
        return false;
    }
    throw ParseError(std::string("invalid ") + what + " '" + s + "' (expected 0 or 1)", line);
}

} // namespace detail

/// Header `point_id,weight,disagree`, disagree in {0,1}.
[[nodiscard]] inline MeasuredDataset read_dataset(std::istream& in)
{
    const detail::Table t(in, {"point_id", "weight", "disagree"});
    std::vector<MeasuredItem> items;
    for (const auto& row : t.rows()) {
        items.push_back({t.get(row, "point_id"), detail::parse_double(t.get(row, "weight"), row.line, "weight"),
                         detail::parse_flag(t.get(row, "disagree"), row.line, "disagree")});
    }
    return MeasuredDataset(std::move(items));
}

/// Header `point_id,weight`.
[[nodiscard]] inline OperationalProfile read_profile(std::istream& in)
{
    const detail::Table t(in, {"point_id", "weight"});
    std::vector<ProfileEntry> entries;
    for (const auto& row : t.rows()) {
        entries.push_back({t.get(row, "point_id"), detail::parse_double(t.get(row, "weight"), row.line, "weight")});
    }
    return OperationalProfile(std::move(entries));
}

/// Header `lo,hi`.
[[nodiscard]] inline std::vector<Interval> read_intervals(std::istream& in)
{
    const detail::Table t(in, {"lo", "hi"});
    std::vector<Interval> out;
    for (const auto& row : t.rows()) {
        out.push_back({detail::parse_double(t.get(row, "lo"), row.line, "lo"),
                       detail::parse_double(t.get(row, "hi"), row.line, "hi")});
    }
    return out;
}

/// Header `point_id,covered`, covered in {0,1}.
[[nodiscard]] inline std::vector<CoverageCell> read_cells(std::istream& in)
{
    const detail::Table t(in, {"point_id", "covered"});
    std::vector<CoverageCell> out;
    for (const auto& row : t.rows()) {
        out.push_back({t.get(row, "point_id"), detail::parse_flag(t.get(row, "covered"), row.line, "covered")});
    }
    return out;
}

/// Header `index,outcome`, outcome in {pass, fail}. Other columns (such as
/// timestamps) are accepted and ignored.
[[nodiscard]] inline DemandLog read_demand_log(std::istream& in)
{
    const detail::Table t(in, {"index", "outcome"});
    std::vector<DemandRecord> records;
    for (const auto& row : t.rows()) {
        const auto& tok = t.get(row, "outcome");
        Outcome o = Outcome::pass;
        if (tok == "pass") {
            o = Outcome::pass;
        } else if (tok == "fail") {
            o = Outcome::fail;
        } else {
            throw ParseError("invalid outcome '" + tok + "' (expected pass or fail)", row.line);
        }
        const auto index = detail::parse_int(t.get(row, "index"), row.line, "index");
        if (!records.empty() && index <= records.back().index) {
            throw ParseError("demand index " + std::to_string(index) + " is not greater than the previous one",
                             row.line);
        }
        records.push_back({index, o});
    }
    return DemandLog(std::move(records));
}

inline void write_demand_log(std::ostream& out, const DemandLog& log)
{
    out << "index,outcome\n";
    for (const auto& r : log.records()) {
        out << r.index << ',' << (r.outcome == Outcome::fail ? "fail" : "pass") << '\n';
    }
}

/// Shortest-exact `%.17g` formatting, so output is byte-stable.
[[nodiscard]] inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_curve(std::ostream& out, const std::vector<CurvePoint>& points)
{
    out << "n,bound\n";
    for (const auto& p : points) {
        out << p.n << ',' << format_double(p.bound) << '\n';
    }
}

} // namespace cbi::io
