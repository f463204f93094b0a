#include "decmdp/io/plot.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "decmdp/errors.hpp"
#include "decmdp/io/csv.hpp"

namespace decmdp::io {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> moving_average(const std::vector<double>& v, std::size_t w) {
  if (w <= 1) return v;
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sum += v[i];
    if (i >= w) sum -= v[i - w];
    out[i] = sum / static_cast<double>(std::min(i + 1, w));
  }
  return out;
}

// Round step of 1, 2 or 5 times a power of ten giving about `target` ticks.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::array<unsigned char, 3> colormap(double t) {
  // Viridis sampled at five stops.
  static constexpr double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  std::array<unsigned char, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<unsigned char>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
  }
  return rgb;
}

}  // namespace

void write_svg_plot(const LinePlot& plot, const std::filesystem::path& out) {
  struct Curve {
    std::vector<double> x, y;
  };
  std::vector<Curve> curves;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : plot.series) {
    const CsvTable t = read_csv(s.csv);
    Curve c{t.values(s.x), moving_average(t.values(s.y), plot.smooth)};
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
      xmin = std::min(xmin, c.x[i]);
      xmax = std::max(xmax, c.x[i]);
      ymin = std::min(ymin, c.y[i]);
      ymax = std::max(ymax, c.y[i]);
    }
    curves.push_back(std::move(c));
  }
  if (!(xmin <= xmax)) xmin = 0.0, xmax = 1.0;
  if (!(ymin <= ymax)) ymin = 0.0, ymax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(plot.title) << "</text>\n";

  const double xs = tick_step(xmax - xmin, 6);
  for (double v = std::ceil(xmin / xs) * xs; v <= xmax + 1e-9 * xs; v += xs) {
    svg << "<line x1=\"" << px(v) << "\" y1=\"" << kTop << "\" x2=\"" << px(v) << "\" y2=\"" << kTop + ph
        << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << px(v) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << fmt(v)
        << "</text>\n";
  }
  const double ys = tick_step(ymax - ymin, 6);
  for (double v = std::ceil(ymin / ys) * ys; v <= ymax + 1e-9 * ys; v += ys) {
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(v) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << py(v)
        << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << fmt(v)
        << "</text>\n";
  }
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
  svg << "<text transform=\"translate(20," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(plot.y_label) << "</text>\n";

  for (std::size_t s = 0; s < curves.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curves[s].x.size(); ++i) {
      if (!std::isfinite(curves[s].y[i])) continue;
      svg << px(curves[s].x[i]) << ',' << py(curves[s].y[i]) << ' ';
    }
    svg << "\"/>\n";
    const double ly = kTop + 12 + 20.0 * static_cast<double>(s);
    svg << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 36 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape(plot.series[s].label)
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream f(out, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + out.string());
  f << svg.str();
}

void write_png_heatmap(const std::filesystem::path& csv, const std::string& value, const std::filesystem::path& out,
                       std::size_t pixels_per_cell) {
  const CsvTable t = read_csv(csv);
  const auto xs = t.values("x");
  const auto ys = t.values("y");
  const auto vs = t.values(value);
  std::map<double, std::size_t> xi, yi;
  for (double x : xs) xi.emplace(x, 0);
  for (double y : ys) yi.emplace(y, 0);
  std::size_t k = 0;
  for (auto& [x, i] : xi) i = k++;
  k = 0;
  for (auto& [y, j] : yi) j = k++;
  const std::size_t nx = xi.size(), ny = yi.size();
  if (nx * ny != vs.size()) throw ConfigError(csv.string() + ": x/y columns do not form a full grid");

  std::vector<double> grid(nx * ny, 0.0);
  for (std::size_t r = 0; r < vs.size(); ++r) grid[yi[ys[r]] * nx + xi[xs[r]]] = vs[r];
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  const double span = *hi > *lo ? *hi - *lo : 1.0;

  const std::size_t ppc = std::max<std::size_t>(1, pixels_per_cell);
  const std::size_t w = nx * ppc, h = ny * ppc;
  std::vector<unsigned char> pixels(w * h * 3);
  for (std::size_t py = 0; py < h; ++py) {
    const std::size_t j = ny - 1 - py / ppc;
    for (std::size_t px = 0; px < w; ++px) {
      const auto rgb = colormap((grid[j * nx + px / ppc] - *lo) / span);
      std::copy(rgb.begin(), rgb.end(), pixels.begin() + static_cast<std::ptrdiff_t>((py * w + px) * 3));
    }
  }

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, out.string().c_str(), 0, pixels.data(), 0, nullptr)) {
    throw ConfigError("cannot write " + out.string() + ": " + image.message);
  }
}

}  // namespace decmdp::io
