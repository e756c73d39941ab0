#include "dla/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

namespace dla::geometry {

raster::Image to_gray(const raster::Image& img) {
  if (img.channels == 1) return img;
  raster::Image out(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.at(x, y) = 0.299f * img.at(x, y, 0) + 0.587f * img.at(x, y, 1) +
                     0.114f * img.at(x, y, 2);
  return out;
}

int otsu_threshold(const raster::Image& gray) {
  std::array<std::int64_t, 256> hist{};
  for (float v : gray.data) {
    int q = static_cast<int>(std::lround(std::clamp(v, 0.f, 1.f) * 255.f));
    ++hist[static_cast<std::size_t>(q)];
  }
  const double total = static_cast<double>(gray.data.size());

  double sum_all = 0;
  for (int i = 0; i < 256; ++i) sum_all += static_cast<double>(i) * hist[i];

  int best_t = 0;
  double best_var = -1;
  double w0 = 0, sum0 = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[t];
    sum0 += static_cast<double>(t) * hist[t];
    double w1 = total - w0;
    double var = 0;
    if (w0 > 0 && w1 > 0) {
      double mu0 = sum0 / w0;
      double mu1 = (sum_all - sum0) / w1;
      var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    }
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  return best_t;
}

namespace {

// 8-neighborhood in clockwise order starting east (x-right, y-down).
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// Moore-neighbor border following around one component of `labels` marked
// with `id`, starting at its raster-first pixel.
std::vector<pagexml::Point> trace_border(const std::vector<int>& labels, int w,
                                         int h, int id, int sx, int sy) {
  auto is_comp = [&](int x, int y) {
    return x >= 0 && x < w && y >= 0 && y < h &&
           labels[static_cast<std::size_t>(y) * w + x] == id;
  };

  std::vector<pagexml::Point> out;
  int cx = sx, cy = sy;
  int backtrack = 4;  // came from the west (start pixel is row-leftmost)
  const int start_backtrack = backtrack;
  do {
    out.push_back({cx, cy});
    int dir = -1;
    for (int i = 1; i <= 8; ++i) {
      int d = (backtrack + i) % 8;
      if (is_comp(cx + kDx[d], cy + kDy[d])) {
        dir = d;
        break;
      }
    }
    if (dir < 0) break;  // isolated pixel
    cx += kDx[dir];
    cy += kDy[dir];
    backtrack = (dir + 4) % 8;
    if (out.size() > static_cast<std::size_t>(4) * w * h) break;  // safety
  } while (cx != sx || cy != sy || backtrack != start_backtrack);

  // Drop the duplicated closing vertex when the loop re-appended the start.
  while (out.size() > 1 && out.back() == out.front()) out.pop_back();
  std::vector<pagexml::Point> dedup;
  for (const auto& p : out)
    if (dedup.empty() || dedup.back() != p) dedup.push_back(p);
  return dedup;
}

}  // namespace

std::vector<pagexml::Polygon> extract_contours(const raster::LabelMap& mask,
                                               double min_area) {
  const int w = mask.width, h = mask.height;
  std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
  std::vector<pagexml::Polygon> contours;

  int next_id = 0;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y) || labels[static_cast<std::size_t>(y) * w + x]) continue;
      int id = ++next_id;
      std::int64_t pixels = 0;
      labels[static_cast<std::size_t>(y) * w + x] = id;
      queue.push_back({x, y});
      while (!queue.empty()) {
        auto [qx, qy] = queue.front();
        queue.pop_front();
        ++pixels;
        for (int d = 0; d < 8; ++d) {
          int nx = qx + kDx[d], ny = qy + kDy[d];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
          if (mask.at(nx, ny) && !labels[ni]) {
            labels[ni] = id;
            queue.push_back({nx, ny});
          }
        }
      }
      if (static_cast<double>(pixels) < min_area) continue;

      pagexml::Polygon poly;
      poly.points = trace_border(labels, w, h, id, x, y);
      if (poly.points.size() < 3) continue;
      if (poly.signed_area2() < 0)
        std::reverse(poly.points.begin(), poly.points.end());
      contours.push_back(std::move(poly));
    }
  }
  return contours;
}

std::map<int, std::vector<pagexml::Polygon>> zone_contours(
    const raster::LabelMap& task2_map, const pagexml::ZoneSchema& schema,
    double min_area) {
  std::map<int, std::vector<pagexml::Polygon>> out;
  for (int k = 1; k < schema.num_classes(); ++k) {
    raster::LabelMap indicator(2, task2_map.width, task2_map.height, 2);
    for (std::size_t i = 0; i < task2_map.values.size(); ++i)
      indicator.values[i] = task2_map.values[i] == k ? 1 : 0;
    out[k] = extract_contours(indicator, min_area);
  }
  return out;
}

std::vector<pagexml::Polygon> baseline_regions(const raster::LabelMap& task1_map,
                                               const pagexml::Polygon& zone,
                                               double min_area) {
  raster::LabelMap region(1, task1_map.width, task1_map.height, 2);
  std::vector<std::pair<double, double>> poly;
  poly.reserve(zone.points.size());
  for (const auto& p : zone.points) poly.emplace_back(p.x, p.y);
  raster::fill_polygon(region, poly, 1);

  for (std::size_t i = 0; i < region.values.size(); ++i)
    region.values[i] = region.values[i] && task1_map.values[i] == 1 ? 1 : 0;
  return extract_contours(region, min_area);
}

namespace {

struct PrefixSums {
  std::vector<double> x, y, xx, yy, xy;
  explicit PrefixSums(const std::vector<pagexml::Point>& pts)
      : x(pts.size() + 1, 0), y(pts.size() + 1, 0), xx(pts.size() + 1, 0),
        yy(pts.size() + 1, 0), xy(pts.size() + 1, 0) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double px = pts[i].x, py = pts[i].y;
      x[i + 1] = x[i] + px;
      y[i + 1] = y[i] + py;
      xx[i + 1] = xx[i] + px * px;
      yy[i + 1] = yy[i] + py * py;
      xy[i + 1] = xy[i] + px * py;
    }
  }

  // Sum of squared distances of points i..j (inclusive) to the line through
  // points i and j.
  double segment_error(const std::vector<pagexml::Point>& pts, std::size_t i,
                       std::size_t j) const {
    double a = static_cast<double>(pts[j].y) - pts[i].y;
    double b = static_cast<double>(pts[i].x) - pts[j].x;
    double norm = a * a + b * b;
    if (norm == 0) return 0;
    double c = -(a * pts[i].x + b * pts[i].y);
    double n = static_cast<double>(j - i + 1);
    double sx = x[j + 1] - x[i], sy = y[j + 1] - y[i];
    double sxx = xx[j + 1] - xx[i], syy = yy[j + 1] - yy[i];
    double sxy = xy[j + 1] - xy[i];
    double num = a * a * sxx + b * b * syy + c * c * n + 2 * a * b * sxy +
                 2 * a * c * sx + 2 * b * c * sy;
    return std::max(0.0, num / norm);
  }
};

struct ReduceResult {
  pagexml::Polyline line;
  double cost = 0;
};

ReduceResult reduce_impl(const DigitalCurve& curve, int m) {
  const auto& pts = curve.points;
  const std::size_t n = pts.size();
  if (n < 2) throw BadM("digital curve needs at least 2 points");
  if (m < 2 || static_cast<std::size_t>(m) > n)
    throw BadM("vertex count out of range");

  if (static_cast<std::size_t>(m) == n) {
    ReduceResult r;
    r.line.points = pts;
    return r;
  }

  PrefixSums sums(pts);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // cost[v][j]: best error covering points 0..j using v+1 vertices ending at j.
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(m),
                                        std::vector<double>(n, kInf));
  std::vector<std::vector<std::size_t>> parent(static_cast<std::size_t>(m),
                                               std::vector<std::size_t>(n, 0));
  cost[0][0] = 0;
  for (int v = 1; v < m; ++v) {
    for (std::size_t j = 1; j < n; ++j) {
      for (std::size_t i = static_cast<std::size_t>(v) - 1; i < j; ++i) {
        if (cost[v - 1][i] == kInf) continue;
        double c = cost[v - 1][i] + sums.segment_error(pts, i, j);
        if (c < cost[static_cast<std::size_t>(v)][j]) {
          cost[static_cast<std::size_t>(v)][j] = c;
          parent[static_cast<std::size_t>(v)][j] = i;
        }
      }
    }
  }

  ReduceResult r;
  r.cost = cost[static_cast<std::size_t>(m) - 1][n - 1];
  std::vector<std::size_t> idx(static_cast<std::size_t>(m));
  idx.back() = n - 1;
  for (int v = m - 1; v > 0; --v)
    idx[static_cast<std::size_t>(v) - 1] = parent[static_cast<std::size_t>(v)][idx[static_cast<std::size_t>(v)]];
  for (std::size_t i : idx) r.line.points.push_back(pts[i]);
  return r;
}

}  // namespace

pagexml::Polyline reduce_polyline(const DigitalCurve& curve, int m) {
  return reduce_impl(curve, m).line;
}

double reduce_polyline_cost(const DigitalCurve& curve, int m) {
  return reduce_impl(curve, m).cost;
}

pagexml::Polyline detect_baseline(const raster::Image& img,
                                  const pagexml::Polygon& contour, int m) {
  int x0, y0, x1, y1;
  contour.bounding_box(x0, y0, x1, y1);
  x0 = std::max(0, x0);
  y0 = std::max(0, y0);
  x1 = std::min(img.width - 1, x1);
  y1 = std::min(img.height - 1, y1);
  if (x0 > x1 || y0 > y1) throw NoInk("contour outside image");
  const int cw = x1 - x0 + 1, ch = y1 - y0 + 1;

  // Membership mask in crop frame; pixels outside the polygon read as paper.
  raster::LabelMap inside(1, cw, ch, 2);
  std::vector<std::pair<double, double>> poly;
  poly.reserve(contour.points.size());
  for (const auto& p : contour.points) poly.emplace_back(p.x - x0, p.y - y0);
  raster::fill_polygon(inside, poly, 1);

  raster::Image gray = to_gray(img);
  raster::Image crop(cw, ch, 1, 1.f);
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x)
      if (inside.at(x, y)) crop.at(x, y) = gray.at(x0 + x, y0 + y);

  const int t = otsu_threshold(crop);
  DigitalCurve curve;
  for (int x = 0; x < cw; ++x) {
    int lowest = -1;
    for (int y = 0; y < ch; ++y) {
      int q = static_cast<int>(std::lround(std::clamp(crop.at(x, y), 0.f, 1.f) * 255.f));
      if (q <= t) lowest = y;  // last write wins: greatest row
    }
    if (lowest >= 0) curve.points.push_back({x + x0, lowest + y0});
  }
  if (curve.points.size() < 2) throw NoInk("no foreground in contour crop");

  int mm = std::min<int>(m, static_cast<int>(curve.points.size()));
  return reduce_polyline(curve, mm);
}

pagexml::PageDocument consolidate_page(const raster::Image& img,
                                       const raster::LabelMap& task1_map,
                                       const raster::LabelMap& task2_map,
                                       ConsolidateMode mode,
                                       const pagexml::ZoneSchema& schema,
                                       const Stage2Config& cfg) {
  const int w = task1_map.width, h = task1_map.height;
  const double min_area = cfg.min_area_frac * w * h;

  pagexml::PageDocument doc;
  doc.width = w;
  doc.height = h;

  auto add_lines = [&](pagexml::Zone& zone) {
    auto regions = baseline_regions(task1_map, zone.boundary, min_area);
    int li = 0;
    for (const auto& region : regions) {
      try {
        pagexml::TextLine line;
        line.baseline = detect_baseline(img, region, cfg.polyline_vertices);
        line.id = zone.id + "_l" + std::to_string(li++);
        zone.lines.push_back(std::move(line));
      } catch (const NoInk&) {
        // candidate without ink support is dropped
      }
    }
  };

  if (mode == ConsolidateMode::kTask1Only) {
    pagexml::Zone zone;
    zone.id = "z0";
    zone.label = "page";
    zone.boundary.points = {{0, 0}, {w, 0}, {w, h}, {0, h}};
    add_lines(zone);
    doc.zones.push_back(std::move(zone));
    return doc;
  }

  auto contours = zone_contours(task2_map, schema, min_area);
  int zi = 0;
  for (const auto& [cls, polys] : contours) {
    for (const auto& poly : polys) {
      pagexml::Zone zone;
      zone.id = "z" + std::to_string(zi++);
      zone.label = schema.name_of(cls);
      zone.boundary = poly;
      if (mode == ConsolidateMode::kBoth) add_lines(zone);
      doc.zones.push_back(std::move(zone));
    }
  }
  return doc;
}

}  // namespace dla::geometry
