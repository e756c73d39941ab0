#include "dla/pagexml.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace dla::pagexml {

namespace {

namespace pt = boost::property_tree;

std::string local_name(const std::string& tag) {
  auto pos = tag.rfind(':');
  return pos == std::string::npos ? tag : tag.substr(pos + 1);
}

const pt::ptree* find_child(const pt::ptree& node, const std::string& name) {
  for (const auto& [key, child] : node)
    if (local_name(key) == name) return &child;
  return nullptr;
}

std::string attr(const pt::ptree& node, const std::string& name) {
  if (auto a = node.get_child_optional("<xmlattr>"))
    if (auto v = a->get_optional<std::string>(name)) return *v;
  return {};
}

int parse_int_attr(const pt::ptree& node, const std::string& name) {
  std::string v = attr(node, name);
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw MalformedXml("bad or missing integer attribute '" + name + "'");
  return out;
}

// "x,y x,y ..." with integer pairs. Clamps to [0,w]x[0,h] and collapses
// consecutive duplicates (which clamping can also introduce).
std::vector<Point> parse_points(const std::string& text, int w, int h,
                                std::vector<std::string>& warnings,
                                const std::string& context) {
  std::vector<Point> pts;
  std::istringstream ss(text);
  std::string tok;
  bool clamped = false;
  while (ss >> tok) {
    auto comma = tok.find(',');
    if (comma == std::string::npos)
      throw BadCoords("missing comma in point '" + tok + "' (" + context + ")");
    int x = 0, y = 0;
    auto rx = std::from_chars(tok.data(), tok.data() + comma, x);
    auto ry = std::from_chars(tok.data() + comma + 1, tok.data() + tok.size(), y);
    if (rx.ec != std::errc() || rx.ptr != tok.data() + comma ||
        ry.ec != std::errc() || ry.ptr != tok.data() + tok.size())
      throw BadCoords("bad point '" + tok + "' (" + context + ")");
    Point p{x, y};
    Point c{std::clamp(p.x, 0, w), std::clamp(p.y, 0, h)};
    if (c != p) clamped = true;
    if (pts.empty() || pts.back() != c) pts.push_back(c);
  }
  if (pts.empty()) throw BadCoords("empty coordinate list (" + context + ")");
  if (clamped) warnings.push_back("clamped out-of-page coordinates in " + context);
  return pts;
}

std::string zone_label_from_custom(const std::string& custom) {
  static const std::regex re(R"(structure\s*\{[^}]*type\s*:\s*([^;\}\s]+)\s*;?)");
  std::smatch m;
  if (std::regex_search(custom, m, re)) return m[1].str();
  return {};
}

void append_escaped(std::string& out, const std::string& text) {
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
}

std::string points_attr(const std::vector<Point>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(pts[i].x);
    out += ',';
    out += std::to_string(pts[i].y);
  }
  return out;
}

constexpr const char* kPageNs2013 =
    "http://schema.primaresearch.org/PAGE/gts/pagecontent/2013-07-15";

}  // namespace

long long Polygon::signed_area2() const {
  long long a = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    const Point& q = points[(i + 1) % points.size()];
    a += static_cast<long long>(p.x) * q.y - static_cast<long long>(q.x) * p.y;
  }
  return a;
}

void Polygon::bounding_box(int& x0, int& y0, int& x1, int& y1) const {
  x0 = y0 = std::numeric_limits<int>::max();
  x1 = y1 = std::numeric_limits<int>::min();
  for (const Point& p : points) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
}

int ZoneSchema::class_of(const std::string& name) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == name) return static_cast<int>(i) + 1;
  return -1;
}

const std::string& ZoneSchema::name_of(int class_index) const {
  return labels.at(static_cast<std::size_t>(class_index) - 1);
}

ZoneSchema ZoneSchema::ohg() {
  return ZoneSchema{{"$pag", "$tip", "$par", "$pac", "$not", "$nop"}};
}

std::size_t PageDocument::line_count() const {
  std::size_t n = 0;
  for (const Zone& z : zones) n += z.lines.size();
  return n;
}

void sort_reading_order(std::vector<Zone>& zones) {
  std::stable_sort(zones.begin(), zones.end(), [](const Zone& a, const Zone& b) {
    int ax0, ay0, ax1, ay1, bx0, by0, bx1, by1;
    a.boundary.bounding_box(ax0, ay0, ax1, ay1);
    b.boundary.bounding_box(bx0, by0, bx1, by1);
    if (ay0 != by0) return ay0 < by0;
    return ax0 < bx0;
  });
}

ParseResult parse_page(const std::string& xml_text, const ZoneSchema& schema,
                       const ParseOptions& opts) {
  pt::ptree tree;
  try {
    std::istringstream in(xml_text);
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw MalformedXml(e.what());
  }

  ParseResult res;

  // Root is PcGts in PAGE files; accept any root and look for Page below it.
  const pt::ptree* root = nullptr;
  std::string root_key;
  for (const auto& [key, child] : tree) {
    if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
    root = &child;
    root_key = key;
    break;
  }
  if (!root) throw MissingPage("document has no elements");

  res.page_namespace = attr(*root, "xmlns");
  if (!res.page_namespace.empty() &&
      res.page_namespace.find("/PAGE/gts/pagecontent/") == std::string::npos)
    res.warnings.push_back("unrecognized namespace: " + res.page_namespace);

  const pt::ptree* page = local_name(root_key) == "Page" ? root : find_child(*root, "Page");
  if (!page) throw MissingPage("no Page element");

  PageDocument& doc = res.doc;
  doc.image_filename = attr(*page, "imageFilename");
  doc.width = parse_int_attr(*page, "imageWidth");
  doc.height = parse_int_attr(*page, "imageHeight");
  if (doc.width <= 0 || doc.height <= 0)
    throw MalformedXml("non-positive page dimensions");

  for (const auto& [key, region] : *page) {
    if (local_name(key) != "TextRegion") continue;
    std::string id = attr(region, "id");
    std::string label = zone_label_from_custom(attr(region, "custom"));
    if (label.empty()) {
      res.warnings.push_back("region '" + id + "' has no structure type; skipped");
      continue;
    }
    if (schema.class_of(label) < 0) {
      if (!opts.lenient)
        throw UnknownLabel("unknown zone label '" + label + "' in region '" + id + "'");
      res.warnings.push_back("unknown label '" + label + "' mapped to '" +
                             opts.fallback_label + "' in region '" + id + "'");
      label = opts.fallback_label;
    }

    Zone zone;
    zone.id = id;
    zone.label = label;

    const pt::ptree* coords = find_child(region, "Coords");
    if (!coords) {
      res.warnings.push_back("region '" + id + "' has no Coords; skipped");
      continue;
    }
    zone.boundary.points = parse_points(attr(*coords, "points"), doc.width,
                                        doc.height, res.warnings, "region " + id);
    if (zone.boundary.points.size() >= 2 &&
        zone.boundary.points.front() == zone.boundary.points.back())
      zone.boundary.points.pop_back();  // explicit ring closure
    if (zone.boundary.points.size() < 3 || zone.boundary.signed_area2() == 0) {
      res.warnings.push_back("region '" + id + "' boundary degenerate; skipped");
      continue;
    }

    for (const auto& [lkey, line_node] : region) {
      if (local_name(lkey) != "TextLine") continue;
      TextLine line;
      line.id = attr(line_node, "id");
      const pt::ptree* bl = find_child(line_node, "Baseline");
      if (!bl) {
        res.warnings.push_back("line '" + line.id + "' has no Baseline; skipped");
        continue;
      }
      line.baseline.points = parse_points(attr(*bl, "points"), doc.width,
                                          doc.height, res.warnings, "line " + line.id);
      if (line.baseline.points.size() < 2) {
        res.warnings.push_back("line '" + line.id + "' baseline degenerate; skipped");
        continue;
      }
      zone.lines.push_back(std::move(line));
    }
    doc.zones.push_back(std::move(zone));
  }
  return res;
}

std::string serialize_page(const PageDocument& doc, const ZoneSchema& schema) {
  (void)schema;  // labels are emitted verbatim; schema governs parsing
  std::vector<Zone> zones = doc.zones;
  sort_reading_order(zones);

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<PcGts xmlns=\"";
  out += kPageNs2013;
  out += "\">\n";
  out += "  <Metadata>\n";
  out += "    <Creator>dla</Creator>\n";
  out += "    <Created>1970-01-01T00:00:00</Created>\n";
  out += "    <LastChange>1970-01-01T00:00:00</LastChange>\n";
  out += "  </Metadata>\n";
  out += "  <Page imageFilename=\"";
  append_escaped(out, doc.image_filename);
  out += "\" imageWidth=\"" + std::to_string(doc.width) + "\" imageHeight=\"" +
         std::to_string(doc.height) + "\">\n";
  for (const Zone& z : zones) {
    out += "    <TextRegion id=\"";
    append_escaped(out, z.id);
    out += "\" custom=\"structure {type:";
    append_escaped(out, z.label);
    out += ";}\">\n";
    out += "      <Coords points=\"" + points_attr(z.boundary.points) + "\"/>\n";
    for (const TextLine& l : z.lines) {
      out += "      <TextLine id=\"";
      append_escaped(out, l.id);
      out += "\">\n";
      out += "        <Baseline points=\"" + points_attr(l.baseline.points) + "\"/>\n";
      out += "      </TextLine>\n";
    }
    out += "    </TextRegion>\n";
  }
  out += "  </Page>\n";
  out += "</PcGts>\n";
  return out;
}

PageDocument scale_layout(const PageDocument& doc, double sx, double sy) {
  if (sx <= 0 || sy <= 0) throw NonPositiveScale("scale factors must be positive");
  PageDocument out = doc;
  out.width = std::max(1, static_cast<int>(std::lround(doc.width * sx)));
  out.height = std::max(1, static_cast<int>(std::lround(doc.height * sy)));
  auto scale_pts = [&](std::vector<Point>& pts) {
    for (Point& p : pts) {
      p.x = std::clamp(static_cast<int>(std::lround(p.x * sx)), 0, out.width);
      p.y = std::clamp(static_cast<int>(std::lround(p.y * sy)), 0, out.height);
    }
  };
  for (Zone& z : out.zones) {
    scale_pts(z.boundary.points);
    for (TextLine& l : z.lines) scale_pts(l.baseline.points);
  }
  return out;
}

}  // namespace dla::pagexml
