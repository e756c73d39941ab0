// Stage 2: consolidates pixel classifications into zone polygons and
// text-line baselines.
#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "dla/pagexml.hpp"
#include "dla/raster.hpp"

namespace dla::geometry {

struct NoInk : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadM : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-task probability volumes from Stage 1, see net::NetOutput; geometry
// consumes the argmax label maps directly.
enum class ConsolidateMode { kBoth, kTask1Only, kTask2Only };

struct Stage2Config {
  int polyline_vertices = 10;     // m in the reduction step
  double min_area_frac = 0.0001;  // contours below this page fraction dropped
};

// Threshold in 0..255 maximizing between-class variance; ties take the
// smallest threshold. Ink (foreground) is value <= threshold.
int otsu_threshold(const raster::Image& gray);

// Outer borders of 8-connected foreground components, traced with positive
// shoelace orientation. Components with fewer than min_area pixels dropped.
std::vector<pagexml::Polygon> extract_contours(const raster::LabelMap& mask,
                                               double min_area = 0);

// Contours of each nonbackground class in a Task-2 map.
std::map<int, std::vector<pagexml::Polygon>> zone_contours(
    const raster::LabelMap& task2_map, const pagexml::ZoneSchema& schema,
    double min_area = 0);

// Contours of the Task-1 map restricted to a zone polygon.
std::vector<pagexml::Polygon> baseline_regions(const raster::LabelMap& task1_map,
                                               const pagexml::Polygon& zone,
                                               double min_area = 0);

// Alg.-style baseline detection: crop to the contour, Otsu-binarize, take the
// lowest ink row of each column, reduce to at most m vertices.
pagexml::Polyline detect_baseline(const raster::Image& img,
                                  const pagexml::Polygon& contour, int m);

// One point per column, x strictly increasing.
struct DigitalCurve {
  std::vector<pagexml::Point> points;
};

// Optimal m-vertex polygonal approximation (vertices chosen among curve
// points, endpoints fixed) minimizing summed squared distance to the line
// through each segment's endpoints. O(m n^2).
pagexml::Polyline reduce_polyline(const DigitalCurve& curve, int m);
double reduce_polyline_cost(const DigitalCurve& curve, int m);

pagexml::PageDocument consolidate_page(const raster::Image& img,
                                       const raster::LabelMap& task1_map,
                                       const raster::LabelMap& task2_map,
                                       ConsolidateMode mode,
                                       const pagexml::ZoneSchema& schema,
                                       const Stage2Config& cfg = {});

// Luminance grayscale (0.299 R + 0.587 G + 0.114 B); identity on gray input.
raster::Image to_gray(const raster::Image& img);

}  // namespace dla::geometry
