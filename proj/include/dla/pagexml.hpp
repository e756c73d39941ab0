// PAGE-XML layout data model, parser and serializer.
#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace dla::pagexml {

struct Point {
  int x = 0;
  int y = 0;
  auto operator<=>(const Point&) const = default;
};

// Open curve with at least 2 points, consecutive points distinct.
struct Polyline {
  std::vector<Point> points;
  bool operator==(const Polyline&) const = default;
};

// Implicitly closed ring of at least 3 vertices.
struct Polygon {
  std::vector<Point> points;
  bool operator==(const Polygon&) const = default;

  // Twice the signed shoelace area (positive = counterclockwise in x-right/y-up axes).
  long long signed_area2() const;
  void bounding_box(int& x0, int& y0, int& x1, int& y1) const;
};

// Zone label vocabulary. Class 0 is reserved for background; label i maps to
// class index i+1, so the Task-2 class count is labels.size() + 1.
struct ZoneSchema {
  std::vector<std::string> labels;

  int num_classes() const { return static_cast<int>(labels.size()) + 1; }
  int class_of(const std::string& name) const;  // -1 if unknown
  const std::string& name_of(int class_index) const;
  bool operator==(const ZoneSchema&) const = default;

  // The six OHG zone types.
  static ZoneSchema ohg();
};

struct TextLine {
  std::string id;
  Polyline baseline;
  bool operator==(const TextLine&) const = default;
};

struct Zone {
  std::string id;
  std::string label;
  Polygon boundary;
  std::vector<TextLine> lines;
  bool operator==(const Zone&) const = default;
};

struct PageDocument {
  std::string image_filename;
  int width = 0;
  int height = 0;
  std::vector<Zone> zones;
  bool operator==(const PageDocument&) const = default;

  std::size_t line_count() const;
};

struct MalformedXml : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingPage : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadCoords : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownLabel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonPositiveScale : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseOptions {
  bool lenient = false;              // map unknown labels instead of throwing
  std::string fallback_label;        // target for unknown labels when lenient
};

struct ParseResult {
  PageDocument doc;
  std::vector<std::string> warnings;  // clamps, skipped elements, odd ids
  std::string page_namespace;         // as found on the root element
};

ParseResult parse_page(const std::string& xml_text, const ZoneSchema& schema,
                       const ParseOptions& opts = {});

std::string serialize_page(const PageDocument& doc, const ZoneSchema& schema);

PageDocument scale_layout(const PageDocument& doc, double sx, double sy);

// Orders zones top-to-bottom then left-to-right by bounding-box top-left;
// the serializer emits zones in this order.
void sort_reading_order(std::vector<Zone>& zones);

}  // namespace dla::pagexml
