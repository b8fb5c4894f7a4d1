#include "shapemap/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace shapemap;

namespace {

const char* kSmall =
    "# three stations on one line\n"
    "station a 0 0 Central Square\n"
    "station b 1.5 -2\n"
    "\n"
    "station c 3 0 @shortcut\n"
    "station a_1 0.25 0 @planarization @origin=a\n"
    "connection ab a b red\n"
    "connection bc b c red,blue @auxiliary\n"
    "connection ca c a_1 - @shortcut\n"
    "line red #ff0000 a b c\n"
    "line blue #0000ff b c\n";

}  // namespace

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1.5), "1.5");
  EXPECT_EQ(format_number(-2.0), "-2");
  EXPECT_EQ(format_number(0.1), "0.1");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    double v = u(rng);
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(NetworkFormat, ParsesEveryField) {
  TransitNetwork net = parse_network(kSmall);
  ASSERT_EQ(net.stations().size(), 4u);
  EXPECT_EQ(net.stations()[0].name, "Central Square");
  EXPECT_EQ(net.stations()[1].pos, (Point{1.5, -2}));
  EXPECT_EQ(net.stations()[2].kind, StationKind::DummyShortcut);
  EXPECT_EQ(net.stations()[3].kind, StationKind::DummyPlanarization);
  EXPECT_EQ(net.stations()[3].origin, "a");
  ASSERT_EQ(net.connections().size(), 3u);
  EXPECT_EQ(net.connections()[1].lines, (std::set<std::string>{"blue", "red"}));
  EXPECT_EQ(net.connections()[1].kind, ConnectionKind::Auxiliary);
  EXPECT_TRUE(net.connections()[2].lines.empty());
  EXPECT_EQ(net.connections()[2].kind, ConnectionKind::DummyShortcut);
  ASSERT_EQ(net.lines().size(), 2u);
  EXPECT_EQ(net.lines()[0].color, (Rgb{255, 0, 0}));
  EXPECT_EQ(net.lines()[0].stations, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(NetworkFormat, RoundTripIsExact) {
  TransitNetwork net = parse_network(kSmall);
  std::string text = emit_network(net);
  EXPECT_EQ(parse_network(text), net);
  EXPECT_EQ(emit_network(parse_network(text)), text);

  // Coordinates that have no short decimal form.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-100, 100);
  std::vector<Point> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({u(rng), u(rng)});
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < 30; ++i) edges.emplace_back(i, i + 1);
  TransitNetwork random = fixtures::make_network(pts, edges);
  EXPECT_EQ(parse_network(emit_network(random)), random);
}

TEST(NetworkFormat, ErrorsCarryLineAndColumn) {
  try {
    parse_network("station a 0 0\nstation b 1 zero\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 13u);
  }
  try {
    parse_network("station a 0 0\n  bogus record\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
  EXPECT_THROW(parse_network("station a 0\n"), ParseError);
  EXPECT_THROW(parse_network("station a 0 0 @weird\n"), ParseError);
  EXPECT_THROW(parse_network("station a 0 0\nstation b 1 0\nline x #12345 a b\n"),
               ParseError);
  EXPECT_THROW(parse_network("station a 0 0\nstation b 1 0\n"
                             "connection x a b -\nconnection y b a -\n"),
               ParseError);
}

TEST(NetworkFormat, ValidationErrorsListViolations) {
  try {
    parse_network("station a 0 0\nconnection x a ghost -\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_FALSE(e.violations().empty());
    EXPECT_EQ(e.violations()[0].subject, "x");
  }
  EXPECT_THROW(parse_network("station a 0 0\nstation a 1 1\n"), ValidationError);
}

TEST(ShapeFormat, RoundTripAndErrors) {
  GuideShape shape({Polyline({{0, 0}, {1, 0}, {1, 1}}, true),
                    Polyline({{0.3, 0.1}, {0.7, 0.1 + 1e-7}}, false)});
  GuideShape back = parse_shape(emit_shape(shape));
  ASSERT_EQ(back.polylines().size(), 2u);
  EXPECT_TRUE(back.polylines()[0].closed());
  EXPECT_FALSE(back.polylines()[1].closed());
  EXPECT_EQ(back.polylines()[1].vertices(), shape.polylines()[1].vertices());
  EXPECT_EQ(back.anchor(), shape.anchor());

  EXPECT_THROW(parse_shape(""), ParseError);
  EXPECT_THROW(parse_shape("polyline open 0 0\n"), ParseError);
  EXPECT_THROW(parse_shape("polyline open 0 0 1\n"), ParseError);
  EXPECT_THROW(parse_shape("polyline ajar 0 0 1 1\n"), ParseError);
  EXPECT_THROW(parse_shape("polyline open 0 0 0 0 1 1\n"), ParseError);
}

TEST(RouteFormat, RoundTrip) {
  std::vector<std::string> ids{"a", "b", "c"};
  EXPECT_EQ(parse_route(emit_route(ids)), ids);
  EXPECT_EQ(parse_route("route a b\n# more\nroute c\n"), ids);
  EXPECT_THROW(parse_route("path a b\n"), ParseError);
}

TEST(LayoutFormat, RoundTripWithPaths) {
  TransitNetwork net = fixtures::make_network({{0, 0}, {1, 0}, {1, 1}}, {{0, 1}, {1, 2}});
  std::vector<Point> pos{{0, 0}, {1.0 / 3.0, 0}, {1, 1}};
  LayoutDocument straight = make_layout("smooth", net, pos);
  ASSERT_EQ(straight.paths.size(), 2u);
  EXPECT_EQ(straight.paths[1].second, (std::vector<Point>{pos[1], pos[2]}));
  EXPECT_EQ(parse_layout(emit_layout(straight)), straight);

  std::vector<std::vector<Point>> paths{{pos[0], pos[1]}, {pos[1], {0.5, 0.5}, pos[2]}};
  LayoutDocument routed = make_layout("grid", net, pos, paths);
  LayoutDocument back = parse_layout(emit_layout(routed));
  EXPECT_EQ(back, routed);
  EXPECT_EQ(back.stage, "grid");
  EXPECT_THROW(parse_layout("station a 0 0\n"), ParseError);
  EXPECT_THROW(parse_layout("layout grid\npath c 0 0\n"), ParseError);
}

TEST(Files, MissingFileNamesPath) {
  try {
    read_file("/nonexistent/net.txt");
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/net.txt"), std::string::npos);
  }
}
