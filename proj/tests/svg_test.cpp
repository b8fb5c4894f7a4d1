#include "shapemap/svg.hpp"

#include <gtest/gtest.h>

#include <regex>

#include "fixtures.hpp"

using namespace shapemap;

namespace {

struct Element {
  std::string tag;
  std::map<std::string, std::string> attrs;
};

std::vector<Element> elements(const std::string& svg, const std::string& tag) {
  std::vector<Element> out;
  std::regex el("<" + tag + R"(((?:\s+[\w-]+="[^"]*")*)\s*/?>)");
  std::regex attr(R"re(([\w-]+)="([^"]*)")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), el); it != std::sregex_iterator();
       ++it) {
    Element e{tag, {}};
    std::string body = (*it)[1];
    for (auto a = std::sregex_iterator(body.begin(), body.end(), attr);
         a != std::sregex_iterator(); ++a) {
      e.attrs[(*a)[1]] = (*a)[2];
    }
    out.push_back(e);
  }
  return out;
}

std::vector<Element> line_paths(const std::string& svg) {
  std::vector<Element> out;
  for (auto& e : elements(svg, "path")) {
    if (e.attrs.count("data-line")) out.push_back(e);
  }
  return out;
}

std::vector<Point> path_points(const std::string& d) {
  std::vector<Point> pts;
  std::regex pt(R"([ML](-?[\d.]+) (-?[\d.]+))");
  for (auto it = std::sregex_iterator(d.begin(), d.end(), pt); it != std::sregex_iterator();
       ++it) {
    pts.push_back({std::stod((*it)[1]), std::stod((*it)[2])});
  }
  return pts;
}

SvgOptions small() {
  SvgOptions o;
  o.width = 120;
  o.margin = 10;
  return o;
}

TransitNetwork one_line() {
  TransitNetwork net;
  net.add_station({"a", "", {0, 0}});
  net.add_station({"b", "", {1, 0}});
  net.add_station({"c", "", {2, 1}});
  net.add_connection({"ab", "a", "b", {"L"}});
  net.add_connection({"bc", "b", "c", {"L"}});
  net.add_line({"L", {10, 20, 30}, {"a", "b", "c"}});
  return net;
}

std::vector<std::vector<Point>> straight(const TransitNetwork& net) {
  std::vector<std::vector<Point>> out;
  for (std::size_t c = 0; c < net.connections().size(); ++c) {
    out.push_back({net.stations()[net.from_index(c)].pos, net.stations()[net.to_index(c)].pos});
  }
  return out;
}

}  // namespace

TEST(Svg, OneLineIsOnePathWithCircles) {
  TransitNetwork net = one_line();
  std::string svg = emit_svg(net, net.positions(), straight(net), {}, nullptr, small());
  // Scale 100 / 2 = 50 px per unit, height 1 * 50 + 2 * 10, y flipped.
  EXPECT_NE(svg.find("height=\"70.00\""), std::string::npos);
  auto paths = line_paths(svg);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].attrs["stroke"], "#0a141e");
  EXPECT_EQ(paths[0].attrs["d"], "M10.00 60.00 L60.00 60.00 L110.00 10.00");
  auto circles = elements(svg, "circle");
  ASSERT_EQ(circles.size(), 3u);
  EXPECT_EQ(circles[2].attrs["data-station"], "c");
  EXPECT_EQ(circles[2].attrs["cx"], "110.00");
  EXPECT_EQ(circles[2].attrs["cy"], "10.00");
}

TEST(Svg, SharedConnectionGivesParallelStrokes) {
  TransitNetwork net;
  net.add_station({"a", "", {0, 0}});
  net.add_station({"b", "", {2, 0}});
  net.add_station({"c", "", {2, 1}});
  net.add_connection({"ab", "a", "b", {"L1", "L2"}});
  net.add_connection({"bc", "b", "c", {"L2"}});
  net.add_line({"L1", {255, 0, 0}, {"a", "b"}});
  net.add_line({"L2", {0, 0, 255}, {"a", "b", "c"}});
  SvgOptions o = small();
  std::string svg = emit_svg(net, net.positions(), straight(net), {}, nullptr, o);
  auto paths = line_paths(svg);
  ASSERT_EQ(paths.size(), 2u);
  auto p1 = path_points(paths[0].attrs["d"]);
  auto p2 = path_points(paths[1].attrs["d"]);
  ASSERT_EQ(p1.size(), 2u);
  // L2 steps from its offset on a-b to the centre of b-c at b.
  ASSERT_EQ(p2.size(), 4u);
  // Both strokes stay horizontal along a-b, one line spacing apart.
  EXPECT_DOUBLE_EQ(p1[0].y, p1[1].y);
  EXPECT_DOUBLE_EQ(p2[0].y, p2[1].y);
  EXPECT_NEAR(std::fabs(p1[0].y - p2[0].y), o.line_spacing * o.stroke, 0.011);
  EXPECT_NEAR(p1[0].y + p2[0].y, 2 * 60.0, 0.011);
  EXPECT_NEAR(p2[2].x, 110.0, 0.011);
  EXPECT_NEAR(p2[2].y, 60.0, 0.011);
  EXPECT_NEAR(p2[3].x, 110.0, 0.011);
  EXPECT_NEAR(p2[3].y, 10.0, 0.011);
}

TEST(Svg, UnroutedConnectionsAreDashed) {
  TransitNetwork net = one_line();
  std::string svg = emit_svg(net, net.positions(), straight(net), {1, 0}, nullptr, small());
  auto paths = line_paths(svg);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[0].attrs.count("stroke-dasharray"), 0u);
  EXPECT_EQ(paths[1].attrs.count("stroke-dasharray"), 1u);
}

TEST(Svg, FragmentsMergeAndDummiesHide) {
  TransitNetwork net;
  net.add_station({"x_0", "", {0, 0}, StationKind::Real, "x"});
  net.add_station({"x_1", "", {1, 0}, StationKind::Real, "x"});
  net.add_station({"d", "", {1, 1}, StationKind::DummyPlanarization, ""});
  net.add_station({"<y>", "", {2, 1}});
  std::string svg = emit_svg(net, net.positions(), {}, {}, nullptr, small());
  auto circles = elements(svg, "circle");
  ASSERT_EQ(circles.size(), 2u);
  EXPECT_EQ(circles[0].attrs["data-station"], "x");
  EXPECT_EQ(circles[0].attrs["cx"], "35.00");
  EXPECT_EQ(circles[1].attrs["data-station"], "&lt;y&gt;");
}

TEST(Svg, ShapeDrawnUnlessDisabled) {
  TransitNetwork net = one_line();
  GuideShape shape({fixtures::square(1.0)});
  std::string with = emit_svg(net, net.positions(), straight(net), {}, &shape, small());
  EXPECT_NE(with.find("id=\"shape\""), std::string::npos);
  SvgOptions o = small();
  o.draw_shape = false;
  std::string without = emit_svg(net, net.positions(), straight(net), {}, &shape, o);
  EXPECT_EQ(without.find("id=\"shape\""), std::string::npos);
}

TEST(Svg, Deterministic) {
  TransitNetwork net = fixtures::grid_network(4, 5);
  std::string a = emit_svg(net, net.positions(), straight(net), {}, nullptr);
  std::string b = emit_svg(net, net.positions(), straight(net), {}, nullptr);
  EXPECT_EQ(a, b);
  EXPECT_EQ(line_paths(a).size(), 9u);
}
