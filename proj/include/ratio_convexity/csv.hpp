#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ratio_convexity/errors.hpp"
#include "ratio_convexity/kde.hpp"

namespace ratio_convexity {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool parse_number(std::string_view token, double& out) {
    token = trim(token);
    if (token.empty()) return false;
    if (token.front() == '+') token.remove_prefix(1);
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace detail

/// Parses comma-separated numeric columns into a Sample. The first row is a
/// header when any of its cells is not a number. Blank lines are skipped.
/// Errors name 1-based file lines (and columns for bad cells).
inline Sample parse_samples_csv(std::istream& in, std::size_t min_count = Sample::kMinimumCount) {
    std::vector<Point> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t arity = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (detail::trim(view).empty()) continue;
        const auto cells = detail::split_commas(view);
        Point values(cells.size());
        std::size_t bad_column = 0;
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (!detail::parse_number(cells[c], values[c])) {
                bad_column = c + 1;
                break;
            }
        if (first_content) {
            first_content = false;
            arity = cells.size();
            if (bad_column != 0) continue;  // header row
        }
        if (cells.size() != arity)
            throw ParseError("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                 " columns, expected " + std::to_string(arity),
                             line_no);
        if (bad_column != 0)
            throw ParseError("row " + std::to_string(line_no) + ", column " + std::to_string(bad_column) +
                                 ": not a number: '" + std::string(detail::trim(cells[bad_column - 1])) + "'",
                             line_no, bad_column);
        rows.push_back(std::move(values));
    }
    if (first_content) throw UsageError("CSV input is empty");
    if (rows.empty()) throw UsageError("CSV input has a header but no data rows");
    return Sample(std::move(rows), min_count);
}

inline Sample parse_samples_csv_text(const std::string& text, std::size_t min_count = Sample::kMinimumCount) {
    std::istringstream in(text);
    return parse_samples_csv(in, min_count);
}

inline Sample parse_samples_csv_file(const std::string& path, std::size_t min_count = Sample::kMinimumCount) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open input file '" + path + "'");
    return parse_samples_csv(in, min_count);
}

}  // namespace ratio_convexity
