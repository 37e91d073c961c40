#pragma once

#include <string>
#include <vector>

namespace chattersim {

/// Parsed bench CSV (schema from write_bench_csv).
struct BenchCsv {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const; // -1 when absent
};

/// Throws std::runtime_error on missing/empty/malformed input.
BenchCsv parse_bench_csv(const std::string& text);

/// Grouped bar chart of one metric column: one group per (rtt, p, q) cell,
/// one bar per protocol. Pure text SVG; identical input gives identical
/// bytes. Throws std::invalid_argument for an unknown metric column.
std::string render_grouped_bars(const BenchCsv& csv, const std::string& metric_column);

} // namespace chattersim
