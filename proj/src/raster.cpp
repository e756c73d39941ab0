#include "dla/raster.hpp"

#include <algorithm>
#include <cmath>

namespace dla::raster {

Image resize_image(const Image& img, int tw, int th) {
  if (tw <= 0 || th <= 0) throw NonPositiveTarget("target size must be positive");
  if (tw == img.width && th == img.height) return img;

  Image out(tw, th, img.channels);
  const double sx = static_cast<double>(img.width) / tw;
  const double sy = static_cast<double>(img.height) / th;
  for (int y = 0; y < th; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
    int y0 = static_cast<int>(fy);
    int y1 = std::min(y0 + 1, img.height - 1);
    double wy = fy - y0;
    for (int x = 0; x < tw; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
      int x0 = static_cast<int>(fx);
      int x1 = std::min(x0 + 1, img.width - 1);
      double wx = fx - x0;
      for (int c = 0; c < img.channels; ++c) {
        double top = img.at(x0, y0, c) * (1 - wx) + img.at(x1, y0, c) * wx;
        double bot = img.at(x0, y1, c) * (1 - wx) + img.at(x1, y1, c) * wx;
        out.at(x, y, c) = static_cast<float>(top * (1 - wy) + bot * wy);
      }
    }
  }
  return out;
}

Tensor normalize_image(const Image& img) {
  Tensor t({img.channels, img.height, img.width});
  std::size_t i = 0;
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        t.data[i++] = 2.f * img.at(x, y, c) - 1.f;
  return t;
}

namespace {

void draw_segment(LabelMap& map, double x0, double y0, double x1, double y1,
                  std::uint8_t value) {
  int steps = static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))) + 1;
  for (int i = 0; i <= steps; ++i) {
    double t = steps ? static_cast<double>(i) / steps : 0.0;
    int x = static_cast<int>(std::lround(x0 + (x1 - x0) * t));
    int y = static_cast<int>(std::lround(y0 + (y1 - y0) * t));
    if (x >= 0 && x < map.width && y >= 0 && y < map.height) map.at(x, y) = value;
  }
}

}  // namespace

void fill_polygon(LabelMap& map, const std::vector<std::pair<double, double>>& poly,
                  std::uint8_t value) {
  if (poly.size() < 3) return;
  const std::size_t n = poly.size();

  double miny = poly[0].second, maxy = poly[0].second;
  for (const auto& [px, py] : poly) {
    miny = std::min(miny, py);
    maxy = std::max(maxy, py);
  }
  int y_begin = std::max(0, static_cast<int>(std::ceil(miny)));
  int y_end = std::min(map.height - 1, static_cast<int>(std::floor(maxy)));

  std::vector<double> xs;
  for (int y = y_begin; y <= y_end; ++y) {
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      auto [ax, ay] = poly[i];
      auto [bx, by] = poly[(i + 1) % n];
      // Half-open in y so shared vertices count once.
      if ((ay <= y && by > y) || (by <= y && ay > y))
        xs.push_back(ax + (bx - ax) * (y - ay) / (by - ay));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      int x_begin = std::max(0, static_cast<int>(std::ceil(xs[i])));
      int x_end = std::min(map.width - 1, static_cast<int>(std::floor(xs[i + 1])));
      for (int x = x_begin; x <= x_end; ++x) map.at(x, y) = value;
    }
  }
  // Boundary pixels are part of the region; the scanline above treats
  // right/bottom edges as exterior.
  for (std::size_t i = 0; i < n; ++i)
    draw_segment(map, poly[i].first, poly[i].second, poly[(i + 1) % n].first,
                 poly[(i + 1) % n].second, value);
}

void stroke_polyline(LabelMap& map, const std::vector<std::pair<double, double>>& line,
                     double width, std::uint8_t value) {
  const double r = width / 2.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    auto [ax, ay] = line[i];
    auto [bx, by] = line[i + 1];
    int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - r)));
    int x1 = std::min(map.width - 1, static_cast<int>(std::ceil(std::max(ax, bx) + r)));
    int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - r)));
    int y1 = std::min(map.height - 1, static_cast<int>(std::ceil(std::max(ay, by) + r)));
    double dx = bx - ax, dy = by - ay;
    double len2 = dx * dx + dy * dy;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        double t = len2 > 0 ? ((x - ax) * dx + (y - ay) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        double ex = ax + t * dx - x, ey = ay + t * dy - y;
        if (ex * ex + ey * ey <= r * r) map.at(x, y) = value;
      }
    }
  }
}

LabelMapStack encode_ground_truth(const pagexml::PageDocument& doc,
                                  const pagexml::ZoneSchema& schema,
                                  int tw, int th, int baseline_width) {
  if (schema.labels.empty()) throw EmptySchema("zone schema has no labels");
  if (tw <= 0 || th <= 0) throw NonPositiveTarget("target size must be positive");

  const double sx = static_cast<double>(tw) / doc.width;
  const double sy = static_cast<double>(th) / doc.height;

  LabelMapStack stack;
  stack.maps.emplace_back(1, tw, th, 2);
  stack.maps.emplace_back(2, tw, th, schema.num_classes());
  LabelMap& base = stack.maps[0];
  LabelMap& zones = stack.maps[1];

  auto scaled = [&](const std::vector<pagexml::Point>& pts) {
    std::vector<std::pair<double, double>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.emplace_back(p.x * sx, p.y * sy);
    return out;
  };

  for (const pagexml::Zone& z : doc.zones) {
    int cls = schema.class_of(z.label);
    if (cls < 0) continue;  // callers validate labels at parse time
    fill_polygon(zones, scaled(z.boundary.points), static_cast<std::uint8_t>(cls));
  }
  for (const pagexml::Zone& z : doc.zones)
    for (const pagexml::TextLine& l : z.lines)
      stroke_polyline(base, scaled(l.baseline.points), baseline_width, 1);

  return stack;
}

}  // namespace dla::raster
