#include "ncs/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ncs {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 540.0;
constexpr double kMargin = 60.0;
constexpr double kFloor = 1e-30;  // log-scale clamp for zero norms

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string coord(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", v);
    return buffer;
}

void svg_open(std::ostream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
}

void svg_axes(std::ostream& out) {
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
        << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
        << "\" fill=\"none\" stroke=\"black\"/>\n";
}

void svg_close(std::ostream& out) { out << "</svg>\n"; }

double x_pixel(double t, double t_max) {
    return kMargin + (t_max > 0 ? t / t_max : 0.0) * (kWidth - 2 * kMargin);
}

}  // namespace

void write_trajectory_svg(std::ostream& out, const std::string& title,
                          const std::vector<std::vector<double>>& series) {
    size_t t_max = 1;
    double v_min = kFloor, v_max = 1.0;
    bool any = false;
    for (const auto& run : series) {
        t_max = std::max(t_max, run.size());
        for (double v : run) {
            const double clamped = std::max(v, kFloor);
            if (!any) {
                v_min = v_max = clamped;
                any = true;
            } else {
                v_min = std::min(v_min, clamped);
                v_max = std::max(v_max, clamped);
            }
        }
    }
    double log_min = std::floor(std::log10(v_min));
    double log_max = std::ceil(std::log10(v_max));
    if (log_max - log_min < 1.0) log_max = log_min + 1.0;

    svg_open(out, title);
    svg_axes(out);

    // Decade grid lines, thinned to at most ~12 labels.
    const int decades = static_cast<int>(log_max - log_min);
    const int step = std::max(1, (decades + 11) / 12);
    for (int k = 0; k <= decades; k += step) {
        const double ly = log_min + k;
        const double y =
            kHeight - kMargin - (ly - log_min) / (log_max - log_min) * (kHeight - 2 * kMargin);
        out << "<line x1=\"" << kMargin << "\" y1=\"" << coord(y) << "\" x2=\""
            << kWidth - kMargin << "\" y2=\"" << coord(y)
            << "\" stroke=\"#dddddd\"/>\n"
            << "<text x=\"" << kMargin - 6 << "\" y=\"" << coord(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e"
            << static_cast<int>(ly) << "</text>\n";
    }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">t</text>\n";

    const double t_span = static_cast<double>(t_max - 1);
    for (size_t s = 0; s < series.size(); ++s) {
        const auto& run = series[s];
        if (run.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[s % 10]
            << "\" stroke-width=\"1\" points=\"";
        for (size_t t = 0; t < run.size(); ++t) {
            const double ly = std::log10(std::max(run[t], kFloor));
            const double y = kHeight - kMargin -
                             (ly - log_min) / (log_max - log_min) * (kHeight - 2 * kMargin);
            if (t) out << " ";
            out << coord(x_pixel(static_cast<double>(t), t_span)) << "," << coord(y);
        }
        out << "\"/>\n";
    }
    svg_close(out);
}

void write_schedule_svg(std::ostream& out, const ScheduleLogic& schedule, int set_count) {
    svg_open(out, "scheduling logic");
    svg_axes(out);
    const double t_span = std::max(1, schedule.horizon);
    auto y_pixel = [&](double j) {
        return kHeight - kMargin - (j - 0.5) / set_count * (kHeight - 2 * kMargin);
    };
    for (int j = 1; j <= set_count; ++j)
        out << "<text x=\"" << kMargin - 6 << "\" y=\"" << coord(y_pixel(j) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">s" << j
            << "</text>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
    for (int t = 0; t < schedule.horizon; ++t) {
        const double j = schedule.assignments[static_cast<size_t>(t)];
        if (t) out << " ";
        out << coord(x_pixel(t, t_span)) << "," << coord(y_pixel(j)) << " "
            << coord(x_pixel(t + 1, t_span)) << "," << coord(y_pixel(j));
    }
    out << "\"/>\n";
    svg_close(out);
}

void write_loss_svg(std::ostream& out, const DataLossSignal& loss) {
    svg_open(out, "data loss signal");
    svg_axes(out);
    const double t_span = std::max(1, loss.horizon);
    const double lanes = static_cast<double>(loss.channels.size());
    auto y_pixel = [&](size_t channel, int bit) {
        const double lane_height = (kHeight - 2 * kMargin) / lanes;
        const double base = kHeight - kMargin - static_cast<double>(channel) * lane_height;
        return base - (bit ? 0.7 : 0.1) * lane_height;
    };
    for (size_t m = 0; m < loss.channels.size(); ++m) {
        out << "<text x=\"" << kMargin - 6 << "\" y=\"" << coord(y_pixel(m, 0))
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">ch" << (m + 1)
            << "</text>\n";
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[m % 10]
            << "\" stroke-width=\"1\" points=\"";
        for (int t = 0; t < loss.horizon; ++t) {
            const int bit = loss.channels[m][static_cast<size_t>(t)];
            if (t) out << " ";
            out << coord(x_pixel(t, t_span)) << "," << coord(y_pixel(m, bit)) << " "
                << coord(x_pixel(t + 1, t_span)) << "," << coord(y_pixel(m, bit));
        }
        out << "\"/>\n";
    }
    svg_close(out);
}

}  // namespace ncs
