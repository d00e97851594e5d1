#include "output.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace xol::cli {

std::string fmt6(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        f << content;
        if (!f.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

constexpr const char* kPalette[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<SvgSeries>& series, bool equality_line) {
    constexpr double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 55;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto grow = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    };
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) grow(x, y);
        for (std::size_t i = 0; i < s.band.size() && i < s.points.size(); ++i) {
            grow(s.points[i].first, s.band[i].first);
            grow(s.points[i].first, s.band[i].second);
        }
    }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
    auto sy = [&](double y) { return h - mb - (y - y0) / (y1 - y0) * (h - mt - mb); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n";
    o << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y0 + (y1 - y0) * i / 5.0;
        o << "<text x=\"" << sx(xv) << "\" y=\"" << h - mb + 18 << "\" text-anchor=\"middle\">" << fmt6(xv)
          << "</text>\n";
        o << "<text x=\"" << ml - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << fmt6(yv)
          << "</text>\n";
    }
    o << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">" << esc(x_label)
      << "</text>\n";
    o << "<text transform=\"translate(16," << (mt + h - mb) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << esc(y_label) << "</text>\n";
    if (equality_line) {
        o << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(x0) << "\" x2=\"" << sx(x1) << "\" y2=\"" << sy(x1)
          << "\" stroke=\"gray\" stroke-dasharray=\"4,4\"/>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % 5];
        if (!s.band.empty() && s.band.size() == s.points.size()) {
            o << "<polygon fill=\"" << colour << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < s.points.size(); ++i)
                o << sx(s.points[i].first) << ',' << sy(s.band[i].second) << ' ';
            for (std::size_t i = s.points.size(); i-- > 0;)
                o << sx(s.points[i].first) << ',' << sy(s.band[i].first) << ' ';
            o << "\"/>\n";
        }
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& [x, y] : s.points) {
            if (std::isfinite(x) && std::isfinite(y)) o << sx(x) << ',' << sy(y) << ' ';
        }
        o << "\"/>\n";
        const double ly = mt + 14.0 * static_cast<double>(k);
        o << "<line x1=\"" << w - mr - 120 << "\" y1=\"" << ly << "\" x2=\"" << w - mr - 100 << "\" y2=\"" << ly
          << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << w - mr - 95 << "\" y=\"" << ly + 4 << "\">" << esc(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace xol::cli
