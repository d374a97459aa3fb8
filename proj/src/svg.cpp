#include "gaitforge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "format.hpp"
#include "gaitforge/errors.hpp"

namespace gaitforge::svg {

namespace {

std::string num(double v)
{
  return detail::fmt(std::round(v * 100.0) / 100.0, 8);
}

std::string escape(const std::string & s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string stroke(const Style & s)
{
  std::string out = "fill=\"none\" stroke=\"" + s.color.hex() + "\" stroke-width=\"" + num(s.width) + "\"";
  if (s.dashed) {
    out += " stroke-dasharray=\"6 4\"";
  }
  return out;
}

std::vector<double> nice_ticks(double lo, double hi)
{
  const double span = hi - lo;
  if (!(span > 0.0)) {
    return {lo};
  }
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  }
  return t;
}

}  // namespace

std::string Color::hex() const
{
  static const char * digits = "0123456789abcdef";
  std::string s = "#";
  for (int c : {r, g, b}) {
    c = std::clamp(c, 0, 255);
    s += digits[c / 16];
    s += digits[c % 16];
  }
  return s;
}

Color diverging(double t, int bands)
{
  t = std::clamp(std::isfinite(t) ? t : 0.0, -1.0, 1.0);
  if (bands > 1) {
    const int k = std::min(bands - 1, static_cast<int>(std::floor((t + 1.0) / 2.0 * bands)));
    t = -1.0 + (2.0 * k + 1.0) / bands;
  }
  static const Color cold{5, 48, 97}, white{247, 247, 247}, hot{103, 0, 31};
  static const Color mid_cold{67, 147, 195}, mid_hot{214, 96, 77};
  auto mix = [](Color a, Color b, double u) {
    return Color{static_cast<int>(std::lround(a.r + (b.r - a.r) * u)), static_cast<int>(std::lround(a.g + (b.g - a.g) * u)),
                 static_cast<int>(std::lround(a.b + (b.b - a.b) * u))};
  };
  const double a = std::abs(t);
  if (t < 0.0) {
    return a < 0.5 ? mix(white, mid_cold, a * 2.0) : mix(mid_cold, cold, (a - 0.5) * 2.0);
  }
  return a < 0.5 ? mix(white, mid_hot, a * 2.0) : mix(mid_hot, hot, (a - 0.5) * 2.0);
}

Plot::Plot(double x_min, double x_max, double y_min, double y_max, std::string title, double width, double height)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), title_(std::move(title)), width_(width),
      height_(height)
{
  if (!(x_max_ > x_min_)) {
    x_max_ = x_min_ + 1.0;
  }
  if (!(y_max_ > y_min_)) {
    y_max_ = y_min_ + 1.0;
  }
}

void Plot::set_labels(std::string x_label, std::string y_label)
{
  x_label_ = std::move(x_label);
  y_label_ = std::move(y_label);
}

double Plot::px(double x) const
{
  return left_ + (x - x_min_) / (x_max_ - x_min_) * (width_ - left_ - right_);
}

double Plot::py(double y) const
{
  return height_ - bottom_ - (y - y_min_) / (y_max_ - y_min_) * (height_ - top_ - bottom_);
}

void Plot::polyline(const std::vector<ShapePoint> & points, const Style & style)
{
  if (points.size() < 2) {
    return;
  }
  std::string pts;
  for (const auto & p : points) {
    if (!pts.empty()) {
      pts += ' ';
    }
    pts += num(px(p.phi1)) + "," + num(py(p.phi2));
  }
  overlay_.push_back(std::string(style.closed ? "<polygon" : "<polyline") + " points=\"" + pts + "\" " + stroke(style) +
                     " stroke-linejoin=\"round\"/>");
}

void Plot::cross(ShapePoint at, const Color & color, const std::string & label)
{
  const double x = px(at.phi1), y = py(at.phi2), r = 6.0;
  overlay_.push_back("<path d=\"M" + num(x - r) + " " + num(y - r) + " L" + num(x + r) + " " + num(y + r) + " M" +
                     num(x - r) + " " + num(y + r) + " L" + num(x + r) + " " + num(y - r) + "\" stroke=\"" +
                     color.hex() + "\" stroke-width=\"2.5\"/>");
  if (!label.empty()) {
    overlay_.push_back("<text x=\"" + num(x + 8) + "\" y=\"" + num(y - 8) + "\" font-size=\"11\" fill=\"" + color.hex() +
                       "\">" + escape(label) + "</text>");
  }
}

void Plot::dot(ShapePoint at, const Color & color, double radius)
{
  overlay_.push_back("<circle cx=\"" + num(px(at.phi1)) + "\" cy=\"" + num(py(at.phi2)) + "\" r=\"" + num(radius) +
                     "\" fill=\"" + color.hex() + "\"/>");
}

void Plot::field(const HeightField & f, int bands, int max_cells)
{
  const int stride = std::max(1, (f.n + max_cells - 1) / max_cells);
  const int m = (f.n - 1) / stride + 1;
  const double scale = std::max(std::abs(f.min()), std::abs(f.max()));
  auto band_of = [&](int i, int j) {
    const double t = scale > 0.0 ? f.at(i, j) / scale : 0.0;
    return diverging(t, bands).hex();
  };
  const double cw = (f.window.phi1_max - f.window.phi1_min) / (m - 1);
  const double ch = (f.window.phi2_max - f.window.phi2_min) / (m - 1);
  for (int jj = 0; jj < m; ++jj) {
    const int j = std::min(jj * stride, f.n - 1);
    const double y0 = f.y(j) - 0.5 * ch, y1 = f.y(j) + 0.5 * ch;
    int start = 0;
    std::string color = band_of(0, j);
    for (int ii = 1; ii <= m; ++ii) {
      const std::string c = ii < m ? band_of(std::min(ii * stride, f.n - 1), j) : std::string();
      if (ii == m || c != color) {
        const double x0 = f.window.phi1_min + (start - 0.5) * cw, x1 = f.window.phi1_min + (ii - 0.5) * cw;
        const double lx = std::max(px(x0), px(f.window.phi1_min)), rx = std::min(px(x1), px(f.window.phi1_max));
        const double ty = std::max(py(y1), py(f.window.phi2_max)), by = std::min(py(y0), py(f.window.phi2_min));
        body_.push_back("<rect x=\"" + num(lx) + "\" y=\"" + num(ty) + "\" width=\"" + num(rx - lx + 0.3) +
                        "\" height=\"" + num(by - ty + 0.3) + "\" fill=\"" + color + "\"/>");
        start = ii;
        color = c;
      }
    }
  }
  // color bar
  std::ostringstream bar;
  const double bx = width_ - right_ + 22, bw = 14, btop = top_, bh = height_ - top_ - bottom_;
  for (int k = 0; k < bands; ++k) {
    const double t = -1.0 + (2.0 * k + 1.0) / bands;
    const double y = btop + bh * (bands - 1 - k) / bands;
    bar << "<rect x=\"" << num(bx) << "\" y=\"" << num(y) << "\" width=\"" << num(bw) << "\" height=\""
        << num(bh / bands + 0.3) << "\" fill=\"" << diverging(t, bands).hex() << "\"/>\n";
  }
  bar << "<text x=\"" << num(bx + bw + 4) << "\" y=\"" << num(btop + 10) << "\" font-size=\"10\">"
      << detail::fmt(scale, 3) << "</text>\n";
  bar << "<text x=\"" << num(bx + bw + 4) << "\" y=\"" << num(btop + bh / 2 + 4) << "\" font-size=\"10\">0</text>\n";
  bar << "<text x=\"" << num(bx + bw + 4) << "\" y=\"" << num(btop + bh) << "\" font-size=\"10\">"
      << detail::fmt(-scale, 3) << "</text>\n";
  colorbar_ = bar.str();
}

void Plot::legend(const std::string & text, const Style & style)
{
  legend_.emplace_back(text, style);
}

std::string Plot::str() const
{
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
    << "\" viewBox=\"0 0 " << num(width_) << " " << num(height_) << "\" font-family=\"sans-serif\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  o << "<text x=\"" << num(width_ / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title_)
    << "</text>\n";
  o << "<defs><clipPath id=\"plot\"><rect x=\"" << num(left_) << "\" y=\"" << num(top_) << "\" width=\""
    << num(width_ - left_ - right_) << "\" height=\"" << num(height_ - top_ - bottom_) << "\"/></clipPath></defs>\n";
  o << "<g clip-path=\"url(#plot)\">\n";
  for (const auto & s : body_) {
    o << s << "\n";
  }
  for (const auto & s : overlay_) {
    o << s << "\n";
  }
  o << "</g>\n";
  // frame, ticks, labels
  const double x0 = px(x_min_), x1 = px(x_max_), y0 = py(y_min_), y1 = py(y_max_);
  o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
    << num(y0 - y1) << "\" fill=\"none\" stroke=\"#000000\"/>\n";
  for (double t : nice_ticks(x_min_, x_max_)) {
    o << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px(t)) << "\" y2=\"" << num(y0 + 5)
      << "\" stroke=\"#000000\"/><text x=\"" << num(px(t)) << "\" y=\"" << num(y0 + 18)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::fmt(t, 4) << "</text>\n";
  }
  for (double t : nice_ticks(y_min_, y_max_)) {
    o << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(py(t))
      << "\" stroke=\"#000000\"/><text x=\"" << num(x0 - 8) << "\" y=\"" << num(py(t) + 4)
      << "\" text-anchor=\"end\" font-size=\"11\">" << detail::fmt(t, 4) << "</text>\n";
  }
  o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(height_ - 12) << "\" text-anchor=\"middle\" font-size=\"12\">"
    << escape(x_label_) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << num((y0 + y1) / 2) << ")\">" << escape(y_label_) << "</text>\n";
  o << colorbar_;
  double ly = top_ + 8;
  for (const auto & [text, style] : legend_) {
    const double lx = x0 + 10;
    o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 22) << "\" y2=\"" << num(ly) << "\" "
      << stroke(style) << "/><text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 4) << "\" font-size=\"11\">"
      << escape(text) << "</text>\n";
    ly += 16;
  }
  o << "</svg>\n";
  return o.str();
}

void Plot::save(const std::string & path) const
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write '" + path + "'");
  }
  out << str();
}

}  // namespace gaitforge::svg
