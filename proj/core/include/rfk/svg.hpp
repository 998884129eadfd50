#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rfk/geometry.hpp"

namespace rfk::svg {

using geometry::BoundingBox;
using geometry::Point;

/// Minimal SVG document in world coordinates (y up), scaled to a fixed pixel width.
class Canvas {
 public:
  explicit Canvas(BoundingBox world, double width_px = 800.0);

  void polyline(const std::vector<Point>& pts, const std::string& stroke, double width = 1.0, bool closed = false);
  void segment(Point a, Point b, const std::string& stroke, double width = 1.0);
  void rect(Point lo, double size, const std::string& fill, double opacity = 1.0);
  void circle(Point c, double radius_px, const std::string& fill);
  void text(Point at, const std::string& content, double size_px = 14.0);

  void write(std::ostream& out) const;
  void save(const std::string& path) const;

 private:
  Point to_px(Point p) const;

  BoundingBox world_;
  double scale_;
  double width_;
  double height_;
  std::vector<std::string> items_;
};

}  // namespace rfk::svg
