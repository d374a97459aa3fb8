#pragma once

#include <string>
#include <vector>

#include "gaitforge/geometry.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge::svg {

struct Color
{
  int r = 0, g = 0, b = 0;
  std::string hex() const;
};

/// Fixed diverging map over t in [-1, 1]: dark blue, white at 0, dark red. Values are
/// quantized into `bands` equal-width bands (odd counts keep a white band centered on 0).
Color diverging(double t, int bands = 11);

/// Line colors used across figures.
namespace palette {
inline constexpr Color purple{118, 42, 131};
inline constexpr Color red{202, 0, 32};
inline constexpr Color blue{33, 102, 172};
inline constexpr Color green{27, 120, 55};
inline constexpr Color black{0, 0, 0};
inline constexpr Color gray{120, 120, 120};
}  // namespace palette

struct Style
{
  Color color = palette::black;
  double width = 1.5;
  bool dashed = false;
  bool closed = false;
};

/// Single-panel plot with data coordinates mapped onto a fixed-size canvas.
class Plot
{
public:
  Plot(double x_min, double x_max, double y_min, double y_max, std::string title, double width = 640,
       double height = 520);

  void set_labels(std::string x_label, std::string y_label);
  void polyline(const std::vector<ShapePoint> & points, const Style & style);
  void cross(ShapePoint at, const Color & color, const std::string & label = {});
  void dot(ShapePoint at, const Color & color, double radius = 3.0);
  /// Banded field image with a color bar; rows of equal band are merged into single rects.
  void field(const HeightField & field, int bands = 11, int max_cells = 300);
  void legend(const std::string & text, const Style & style);

  std::string str() const;
  /// Throws Error when the file cannot be written.
  void save(const std::string & path) const;

private:
  double px(double x) const;
  double py(double y) const;

  double x_min_, x_max_, y_min_, y_max_;
  std::string title_;
  std::string x_label_ = "phi1", y_label_ = "phi2";
  double width_, height_;
  double left_ = 64, right_ = 110, top_ = 36, bottom_ = 52;
  std::vector<std::string> body_;
  std::vector<std::string> overlay_;
  std::vector<std::pair<std::string, Style>> legend_;
  std::string colorbar_;
};

}  // namespace gaitforge::svg
