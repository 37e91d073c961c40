#include "chattersim/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace chattersim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// One fill per protocol, assigned in first-seen order.
constexpr const char* kPalette[] = {
    "#4878a8", "#d65f5f", "#6aa66a", "#b07aa1", "#e0a040", "#777777",
    "#56b4c9", "#9a6b4f",
};

} // namespace

int BenchCsv::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

BenchCsv parse_bench_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty CSV");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    BenchCsv csv;
    csv.columns = split_csv_line(line);
    if (csv.columns.empty()) {
        throw std::runtime_error("empty CSV header");
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto row = split_csv_line(line);
        if (row.size() != csv.columns.size()) {
            throw std::runtime_error("CSV row has " + std::to_string(row.size()) +
                                     " fields, expected " + std::to_string(csv.columns.size()));
        }
        csv.rows.push_back(std::move(row));
    }
    if (csv.rows.empty()) {
        throw std::runtime_error("CSV has no data rows");
    }
    return csv;
}

std::string render_grouped_bars(const BenchCsv& csv, const std::string& metric_column) {
    const int metric_col = csv.column_index(metric_column);
    if (metric_col < 0) {
        throw std::invalid_argument("unknown metric column: " + metric_column);
    }
    const int proto_col = csv.column_index("protocol");
    const int rtt_col = csv.column_index("rtt_ms");
    const int p_col = csv.column_index("p");
    const int q_col = csv.column_index("q");
    if (proto_col < 0 || rtt_col < 0 || p_col < 0 || q_col < 0) {
        throw std::invalid_argument("CSV lacks protocol/rtt_ms/p/q columns");
    }

    // Groups: unique cells in row order. Bars: unique protocols in row order.
    std::vector<std::string> groups;
    std::vector<std::string> protocols;
    auto find_or_add = [](std::vector<std::string>& xs, const std::string& x) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] == x) {
                return i;
            }
        }
        xs.push_back(x);
        return xs.size() - 1;
    };

    struct Bar {
        std::size_t group;
        std::size_t protocol;
        double value;
    };
    std::vector<Bar> bars;
    double max_value = 0.0;
    for (const auto& row : csv.rows) {
        const std::string cell = "rtt=" + row[static_cast<std::size_t>(rtt_col)] +
                                 " p=" + row[static_cast<std::size_t>(p_col)] +
                                 " q=" + row[static_cast<std::size_t>(q_col)];
        double value = 0.0;
        try {
            value = std::stod(row[static_cast<std::size_t>(metric_col)]);
        } catch (const std::exception&) {
            throw std::runtime_error("non-numeric value in column " + metric_column);
        }
        Bar bar;
        bar.group = find_or_add(groups, cell);
        bar.protocol = find_or_add(protocols, row[static_cast<std::size_t>(proto_col)]);
        bar.value = value;
        bars.push_back(bar);
        max_value = std::max(max_value, value);
    }
    if (max_value <= 0.0) {
        max_value = 1.0;
    }

    const double margin_left = 70.0;
    const double margin_bottom = 70.0;
    const double margin_top = 40.0;
    const double plot_h = 300.0;
    const double group_w = 30.0 + 18.0 * static_cast<double>(protocols.size());
    const double plot_w = group_w * static_cast<double>(groups.size());
    const double width = margin_left + plot_w + 160.0; // room for the legend
    const double height = margin_top + plot_h + margin_bottom;
    const double y_scale = plot_h / (max_value * 1.1);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
        << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << fmt(margin_left) << "\" y=\"24\" font-family=\"sans-serif\" "
           "font-size=\"15\">"
        << metric_column << "</text>\n";

    // Axes and y ticks.
    const double x0 = margin_left;
    const double y0 = margin_top + plot_h;
    svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(margin_top) << "\" x2=\"" << fmt(x0)
        << "\" y2=\"" << fmt(y0) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0 + plot_w)
        << "\" y2=\"" << fmt(y0) << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 5; ++tick) {
        const double v = max_value * 1.1 * tick / 5.0;
        const double y = y0 - v * y_scale;
        svg << "<line x1=\"" << fmt(x0 - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x0)
            << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v)
            << "</text>\n";
    }

    for (const Bar& bar : bars) {
        const double bw = 16.0;
        const double gx = x0 + group_w * static_cast<double>(bar.group) + 15.0;
        const double x = gx + 18.0 * static_cast<double>(bar.protocol);
        const double h = bar.value * y_scale;
        const char* fill = kPalette[bar.protocol % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y0 - h) << "\" width=\"" << fmt(bw)
            << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"/>\n";
    }

    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double cx = x0 + group_w * (static_cast<double>(g) + 0.5);
        svg << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(y0 + 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << groups[g] << "</text>\n";
    }

    for (std::size_t pi = 0; pi < protocols.size(); ++pi) {
        const double lx = x0 + plot_w + 24.0;
        const double ly = margin_top + 18.0 * static_cast<double>(pi);
        const char* fill = kPalette[pi % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly) << "\" width=\"12\" height=\"12\" "
               "fill=\""
            << fill << "\"/>\n";
        svg << "<text x=\"" << fmt(lx + 18) << "\" y=\"" << fmt(ly + 10)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << protocols[pi] << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

} // namespace chattersim
