#pragma once

#include <string>
#include <vector>

#include "tropc/csv.hpp"

namespace tropc::io {

/// Minimal SVG builder with a linear world-to-pixel map. Plots are pure
/// views of their CSV inputs: identical data gives identical bytes.
class Svg {
 public:
  Svg(double width, double height, double world_x0, double world_y0, double world_x1,
      double world_y1)
      : w_(width), h_(height), x0_(world_x0), y0_(world_y0), x1_(world_x1), y1_(world_y1) {}

  double px(double x) const { return (x - x0_) / (x1_ - x0_) * w_; }
  double py(double y) const { return h_ - (y - y0_) / (y1_ - y0_) * h_; }

  void circle(double cx, double cy, double world_r, const std::string& stroke) {
    body_ += "<circle cx=\"" + fmt(px(cx)) + "\" cy=\"" + fmt(py(cy)) + "\" r=\"" +
             fmt(world_r / (x1_ - x0_) * w_) + "\" fill=\"none\" stroke=\"" + stroke +
             "\" stroke-width=\"1\"/>\n";
  }

  void dot(double x, double y, double pix_r, const std::string& fill) {
    body_ += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"" + fmt(pix_r) +
             "\" fill=\"" + fill + "\"/>\n";
  }

  void line(double xa, double ya, double xb, double yb, const std::string& stroke) {
    body_ += "<line x1=\"" + fmt(px(xa)) + "\" y1=\"" + fmt(py(ya)) + "\" x2=\"" + fmt(px(xb)) +
             "\" y2=\"" + fmt(py(yb)) + "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    std::string s = "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"1\" points=\"";
    for (const auto& [x, y] : pts) s += fmt(px(x)) + "," + fmt(py(y)) + " ";
    body_ += s + "\"/>\n";
  }

  void text(double x, double y, const std::string& t) {
    body_ += "<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(py(y)) + "\" font-size=\"10\">" + t +
             "</text>\n";
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w_) + "\" height=\"" +
           fmt(h_) + "\">\n" + body_ + "</svg>\n";
  }

 private:
  double w_, h_, x0_, y0_, x1_, y1_;
  std::string body_;
};

inline std::string palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return colors[i % 8];
}

}  // namespace tropc::io
