#include "evfcr/svg.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "evfcr/csv.hpp"

namespace evfcr {

namespace {

constexpr int kW = 960, kH = 420;
constexpr int kLeft = 70, kRight = 20, kTop = 40, kBottom = 40;
const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

void header(std::ofstream& out, const std::string& title, double y_max,
            const std::string& y_label) {
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << kW / 2 << "' y='24' text-anchor='middle' font-family='sans-serif' "
           "font-size='16'>" << title << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double frac = i / 4.0;
        const int y = kTop + static_cast<int>((1.0 - frac) * (kH - kTop - kBottom));
        out << "<line x1='" << kLeft << "' y1='" << y << "' x2='" << kW - kRight << "' y2='" << y
            << "' stroke='#ddd'/>\n"
            << "<text x='" << kLeft - 6 << "' y='" << y + 4
            << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
            << fmt_double(y_max * frac) << "</text>\n";
    }
    out << "<text x='16' y='" << kH / 2
        << "' font-family='sans-serif' font-size='12' transform='rotate(-90 16 " << kH / 2
        << ")' text-anchor='middle'>" << y_label << "</text>\n";
}

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::vector<std::pair<std::string, std::vector<double>>>& series,
                          const std::string& y_label) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write chart: " + path);
    double y_max = 1.0;
    std::size_t n = 0;
    for (const auto& [name, values] : series) {
        n = std::max(n, values.size());
        for (double v : values) y_max = std::max(y_max, v);
    }
    header(out, title, y_max, y_label);
    const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
    int color = 0;
    for (const auto& [name, values] : series) {
        out << "<polyline fill='none' stroke='" << kColors[color % 6] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double x = kLeft + (n > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
            const double y = kTop + (1.0 - values[i] / y_max) * plot_h;
            out << fmt_double(x) << ',' << fmt_double(y) << ' ';
        }
        out << "'/>\n";
        out << "<text x='" << kW - kRight - 150 << "' y='" << kTop + 16 * (color + 1)
            << "' font-family='sans-serif' font-size='12' fill='" << kColors[color % 6] << "'>"
            << name << "</text>\n";
        ++color;
    }
    out << "</svg>\n";
}

void write_bar_chart_svg(const std::string& path, const std::string& title,
                         const std::vector<std::pair<std::string, double>>& bars,
                         const std::string& y_label) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write chart: " + path);
    double y_max = 1.0;
    for (const auto& [name, v] : bars) y_max = std::max(y_max, v);
    header(out, title, y_max, y_label);
    const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
    const double step = plot_w / static_cast<double>(bars.size());
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double h = std::max(0.0, bars[i].second / y_max) * plot_h;
        const double x = kLeft + step * static_cast<double>(i) + step * 0.15;
        out << "<rect x='" << fmt_double(x) << "' y='" << fmt_double(kTop + plot_h - h)
            << "' width='" << fmt_double(step * 0.7) << "' height='" << fmt_double(h)
            << "' fill='" << kColors[i % 6] << "'/>\n"
            << "<text x='" << fmt_double(x + step * 0.35) << "' y='" << kH - kBottom + 16
            << "' text-anchor='middle' font-family='sans-serif' font-size='12'>" << bars[i].first
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace evfcr
