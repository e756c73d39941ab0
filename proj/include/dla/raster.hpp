// Images, per-task label maps, and ground-truth rasterization.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dla/pagexml.hpp"
#include "dla/tensor.hpp"

namespace dla::raster {

struct NonPositiveTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySchema : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Row-major float image, values in [0,1], 1 (gray) or 3 (RGB) channels
// interleaved per pixel.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.f)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, fill) {}

  float& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

// Integer class map for one task; values in 0..num_classes-1, 0 = background.
struct LabelMap {
  int task = 0;
  int width = 0;
  int height = 0;
  int num_classes = 2;
  std::vector<std::uint8_t> values;

  LabelMap() = default;
  LabelMap(int t, int w, int h, int k)
      : task(t), width(w), height(h), num_classes(k),
        values(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  bool operator==(const LabelMap&) const = default;
};

// One map per task, identical sizes. maps[0] is Task-1 (baselines),
// maps[1] is Task-2 (zones).
struct LabelMapStack {
  std::vector<LabelMap> maps;
  bool operator==(const LabelMapStack&) const = default;
};

Image resize_image(const Image& img, int tw, int th);

// Maps [0,1] to [-1,1] channel-planar: output shape (channels, h, w).
Tensor normalize_image(const Image& img);

// Rasterizes zones (Task-2, even-odd fill, later zones over earlier) and
// baseline strokes (Task-1, stroke of baseline_width px centered on the
// curve). Document coordinates are scaled to tw x th before rasterization.
LabelMapStack encode_ground_truth(const pagexml::PageDocument& doc,
                                  const pagexml::ZoneSchema& schema,
                                  int tw, int th, int baseline_width);

// Even-odd polygon fill (plus outline) of `value` into `map`, clipped to the
// map. Vertices are taken as pixel-center coordinates.
void fill_polygon(LabelMap& map, const std::vector<std::pair<double, double>>& poly,
                  std::uint8_t value);

// Paints every pixel whose center lies within width/2 of the polyline.
void stroke_polyline(LabelMap& map, const std::vector<std::pair<double, double>>& line,
                     double width, std::uint8_t value);

}  // namespace dla::raster
