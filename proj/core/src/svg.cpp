#include "rfk/svg.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "rfk/error.hpp"

namespace rfk::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
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

}  // namespace

Canvas::Canvas(BoundingBox world, double width_px) : world_(world), width_(width_px) {
  const double w = world.hi.x - world.lo.x;
  const double h = world.hi.y - world.lo.y;
  if (!(w > 0.0 && h > 0.0)) throw Error(ErrorCode::InvalidArgument, "empty SVG world box");
  scale_ = width_px / w;
  height_ = h * scale_;
}

Point Canvas::to_px(Point p) const { return {(p.x - world_.lo.x) * scale_, (world_.hi.y - p.y) * scale_}; }

void Canvas::polyline(const std::vector<Point>& pts, const std::string& stroke, double width, bool closed) {
  if (pts.empty()) return;
  std::string s = closed ? "<polygon fill=\"none\" points=\"" : "<polyline fill=\"none\" points=\"";
  for (const Point& p : pts) {
    const Point q = to_px(p);
    s += num(q.x) + "," + num(q.y) + " ";
  }
  s += "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>";
  items_.push_back(std::move(s));
}

void Canvas::segment(Point a, Point b, const std::string& stroke, double width) {
  const Point p = to_px(a);
  const Point q = to_px(b);
  items_.push_back("<line x1=\"" + num(p.x) + "\" y1=\"" + num(p.y) + "\" x2=\"" + num(q.x) + "\" y2=\"" + num(q.y) +
                   "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>");
}

void Canvas::rect(Point lo, double size, const std::string& fill, double opacity) {
  const Point p = to_px({lo.x, lo.y + size});
  items_.push_back("<rect x=\"" + num(p.x) + "\" y=\"" + num(p.y) + "\" width=\"" + num(size * scale_) +
                   "\" height=\"" + num(size * scale_) + "\" fill=\"" + fill + "\" fill-opacity=\"" + num(opacity) +
                   "\"/>");
}

void Canvas::circle(Point c, double radius_px, const std::string& fill) {
  const Point p = to_px(c);
  items_.push_back("<circle cx=\"" + num(p.x) + "\" cy=\"" + num(p.y) + "\" r=\"" + num(radius_px) + "\" fill=\"" +
                   fill + "\"/>");
}

void Canvas::text(Point at, const std::string& content, double size_px) {
  const Point p = to_px(at);
  items_.push_back("<text x=\"" + num(p.x) + "\" y=\"" + num(p.y) + "\" font-size=\"" + num(size_px) +
                   "\" font-family=\"sans-serif\">" + escape(content) + "</text>");
}

void Canvas::write(std::ostream& out) const {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
      << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& item : items_) out << item << '\n';
  out << "</svg>\n";
}

void Canvas::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  write(out);
}

}  // namespace rfk::svg
