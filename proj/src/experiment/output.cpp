#include "nhfi/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nhfi {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Panel {
    std::string name;
    const std::vector<double>* t;
    const std::vector<double>* y;
};

}  // namespace

void emit_csv(const TrajectoryRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write CSV file '" + path + "'");
    out << "t";
    for (const auto& name : record.channel_names) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < record.times.size(); ++i) {
        out << format_value(record.times[i]);
        for (const auto& ch : record.channels) out << ',' << format_value(ch[i]);
        out << '\n';
    }
    if (!out) throw Error("I/O failure while writing '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read CSV file '" + path + "'");
    CsvTable table;
    std::string line;
    if (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) table.header.push_back(item);
        table.columns.resize(table.header.size());
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string item;
        std::size_t col = 0;
        while (std::getline(ss, item, ',')) {
            if (col >= table.columns.size()) throw Error("ragged CSV row in '" + path + "'");
            table.columns[col++].push_back(std::strtod(item.c_str(), nullptr));
        }
    }
    return table;
}

void emit_svg(const TrajectoryRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write SVG file '" + path + "'");

    const int width = 720;
    const int panel_h = 130;
    const int margin = 42;
    const int plot_w = width - 2 * margin;
    const int plot_h = panel_h - 36;
    const int n = static_cast<int>(record.channel_names.size());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << n * panel_h + 10 << "\">\n";

    const double t0 = record.times.empty() ? 0.0 : record.times.front();
    const double t1 = record.times.empty() ? 1.0 : record.times.back();
    const double tspan = (t1 > t0) ? (t1 - t0) : 1.0;

    for (int c = 0; c < n; ++c) {
        const auto& y = record.channels[c];
        const int top = c * panel_h + 10;
        double lo = 0.0, hi = 1.0;
        if (!y.empty()) {
            lo = *std::min_element(y.begin(), y.end());
            hi = *std::max_element(y.begin(), y.end());
        }
        if (!(hi > lo)) {
            hi = lo + 1.0;
            lo -= 1.0;
        }
        out << "<rect x=\"" << margin << "\" y=\"" << top << "\" width=\"" << plot_w
            << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#999\"/>\n";
        out << "<text x=\"" << margin << "\" y=\"" << top + plot_h + 16
            << "\" font-size=\"11\" font-family=\"monospace\">" << record.channel_names[c]
            << "  [" << format_value(lo) << ", " << format_value(hi) << "]  t in ["
            << format_value(t0) << ", " << format_value(t1) << "]</text>\n";
        if (!y.empty()) {
            out << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1\" points=\"";
            const std::size_t stride = std::max<std::size_t>(1, y.size() / 2000);
            for (std::size_t i = 0; i < y.size(); i += stride) {
                const double px = margin + plot_w * (record.times[i] - t0) / tspan;
                const double py = top + plot_h - plot_h * (y[i] - lo) / (hi - lo);
                out << px << ',' << py << ' ';
            }
            out << "\"/>\n";
        }
    }
    out << "</svg>\n";
    if (!out) throw Error("I/O failure while writing '" + path + "'");
}

}  // namespace nhfi
