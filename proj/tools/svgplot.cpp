#include "svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "config.hpp"

namespace cli {

namespace {

constexpr double kPanelWidth = 480.0;
constexpr double kPanelHeight = 400.0;
constexpr double kMarginLeft = 62.0;
constexpr double kMarginRight = 18.0;
constexpr double kMarginTop = 42.0;
constexpr double kMarginBottom = 52.0;

struct Series {
    const char* label;
    const char* color;
    std::vector<double> values;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// One panel with its own y range; x runs over epochs 1..n.
void panel(std::ostringstream& out, double x_off, const std::string& title,
           const std::vector<Series>& series, double y_lo, double y_hi) {
    const size_t n = series.front().values.size();
    const double plot_w = kPanelWidth - kMarginLeft - kMarginRight;
    const double plot_h = kPanelHeight - kMarginTop - kMarginBottom;
    const double x0 = x_off + kMarginLeft;
    const double y0 = kMarginTop;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;

    const auto px = [&](size_t i) {
        return n == 1 ? x0 + plot_w / 2
                      : x0 + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    const auto py = [&](double v) { return y0 + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo)); };

    out << "<text x=\"" << num(x0 + plot_w / 2) << "\" y=\"" << num(y0 - 18)
        << "\" text-anchor=\"middle\" font-size=\"15\" font-weight=\"bold\">" << title
        << "</text>\n";

    const int y_ticks = 5;
    for (int t = 0; t <= y_ticks; ++t) {
        const double v = y_lo + (y_hi - y_lo) * t / y_ticks;
        const double y = py(v);
        out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0 + plot_w)
            << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(v) << "</text>\n";
    }

    const size_t x_step = std::max<size_t>(1, (n + 7) / 8);
    for (size_t i = 0; i < n; i += x_step) {
        const double x = px(i);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0 + plot_h) << "\" x2=\"" << num(x)
            << "\" y2=\"" << num(y0 + plot_h + 5) << "\" stroke=\"#333333\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + plot_h + 18)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << (i + 1) << "</text>\n";
    }
    out << "<text x=\"" << num(x0 + plot_w / 2) << "\" y=\"" << num(y0 + plot_h + 38)
        << "\" text-anchor=\"middle\" font-size=\"12\">epoch</text>\n";

    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\""
        << num(y0 + plot_h) << "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0 + plot_h) << "\" x2=\""
        << num(x0 + plot_w) << "\" y2=\"" << num(y0 + plot_h)
        << "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        const Series& sr = series[s];
        out << "<polyline fill=\"none\" stroke=\"" << sr.color << "\" stroke-width=\"2\" points=\"";
        for (size_t i = 0; i < n; ++i) {
            if (i) out << ' ';
            out << num(px(i)) << ',' << num(py(sr.values[i]));
        }
        out << "\"/>\n";
        for (size_t i = 0; i < n; ++i)
            out << "<circle cx=\"" << num(px(i)) << "\" cy=\"" << num(py(sr.values[i]))
                << "\" r=\"2.5\" fill=\"" << sr.color << "\"/>\n";
        const double ly = y0 + 14 + 16 * static_cast<double>(s);
        out << "<rect x=\"" << num(x0 + plot_w - 104) << "\" y=\"" << num(ly - 9)
            << "\" width=\"10\" height=\"10\" fill=\"" << sr.color << "\"/>\n";
        out << "<text x=\"" << num(x0 + plot_w - 90) << "\" y=\"" << num(ly)
            << "\" font-size=\"12\">" << sr.label << "</text>\n";
    }
}

}  // namespace

std::string training_curves_svg(const std::vector<std::array<double, 4>>& rows) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 400\" "
           "font-family=\"sans-serif\">\n";
    out << "<rect width=\"960\" height=\"400\" fill=\"#ffffff\"/>\n";
    if (rows.empty()) {
        out << "<text x=\"480\" y=\"200\" text-anchor=\"middle\">no epochs logged</text>\n";
        out << "</svg>\n";
        return out.str();
    }

    std::vector<Series> acc = {{"train", "#1f77b4", {}}, {"val", "#d62728", {}}};
    std::vector<Series> loss = {{"train", "#1f77b4", {}}, {"val", "#d62728", {}}};
    double loss_hi = 0.0;
    for (const auto& r : rows) {
        loss[0].values.push_back(r[0]);
        acc[0].values.push_back(r[1]);
        loss[1].values.push_back(r[2]);
        acc[1].values.push_back(r[3]);
        loss_hi = std::max({loss_hi, r[0], r[2]});
    }
    panel(out, 0.0, "accuracy", acc, 0.0, 1.0);
    panel(out, kPanelWidth, "loss", loss, 0.0, loss_hi * 1.05);
    out << "</svg>\n";
    return out.str();
}

void write_training_curves_svg(const std::string& path,
                               const std::vector<std::array<double, 4>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RunError("cannot open " + path + " for writing");
    out << training_curves_svg(rows);
    if (!out.flush()) throw RunError("cannot write " + path);
}

}  // namespace cli
