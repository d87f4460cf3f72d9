#include "klmc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "klmc/trace_io.hpp"

namespace klmc {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt_tick(double v) {
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-3))
    std::snprintf(buf, sizeof(buf), "%.1e", v);
  else
    std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void LinePlot::add_series(std::string name, std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("LinePlot: xs/ys size mismatch");
  series_.push_back({std::move(name), std::move(xs), std::move(ys)});
}

void LinePlot::write(const std::string& path) const {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  auto tx = [&](double x) { return log_x_ ? std::log10(x) : x; };
  auto ty = [&](double y) { return log_y_ ? std::log10(y) : y; };
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (log_x_ && !(s.xs[i] > 0.0)) continue;
      if (log_y_ && !(s.ys[i] > 0.0)) continue;
      double x = tx(s.xs[i]), y = ty(s.ys[i]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  double xpad = 0.03 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad, xmax += xpad, ymin -= ypad, ymax += ypad;

  auto px = [&](double x) {
    return kLeft + (tx(x) - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
  };
  auto py = [&](double y) {
    return kHeight - kBottom - (ty(y) - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";

  // Axes box.
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << kWidth - kLeft - kRight << "\" height=\"" << kHeight - kTop - kBottom
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Five ticks per axis in transformed space.
  for (int i = 0; i <= 4; ++i) {
    double fx = xmin + (xmax - xmin) * i / 4.0;
    double fy = ymin + (ymax - ymin) * i / 4.0;
    double vx = log_x_ ? std::pow(10.0, fx) : fx;
    double vy = log_y_ ? std::pow(10.0, fy) : fy;
    double sx = kLeft + (fx - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
    double sy = kHeight - kBottom - (fy - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
    out << "<line x1=\"" << sx << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << sx
        << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(vx) << "</text>\n";
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy << "\" x2=\"" << kLeft
        << "\" y2=\"" << sy << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(vy) << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel_
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << (kTop + kHeight - kBottom) / 2 << ")\">" << ylabel_
      << "</text>\n";

  for (std::size_t s = 0; s < series_.size(); ++s) {
    const char* color = kPalette[s % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < series_[s].xs.size(); ++i) {
      if (log_x_ && !(series_[s].xs[i] > 0.0)) continue;
      if (log_y_ && !(series_[s].ys[i] > 0.0)) continue;
      out << px(series_[s].xs[i]) << "," << py(series_[s].ys[i]) << " ";
    }
    out << "\"/>\n";
    double ly = kTop + 16 + 16.0 * s;
    out << "<line x1=\"" << kWidth - kRight - 150 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kRight - 125 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight - 120 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << series_[s].name
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace klmc
