// Line-oriented text formats for networks, guide shapes, routes and layouts.
//
// Every format is a sequence of records, one per line. Blank lines and lines
// starting with '#' are ignored. Tokens are separated by spaces or tabs.
//
//   Network
//     station <id> <x> <y> [@<kind>] [@origin=<id>] [<name ...>]
//     connection <id> <from> <to> <line,line,...|-> [@<kind>]
//     line <id> #rrggbb <station> <station> ...
//   Station kinds: planarization, shortcut. Connection kinds: shortcut,
//   auxiliary. Omitted kinds are real. The name is the rest of the line and
//   may not start with '@'.
//
//   Shape
//     polyline open|closed <x> <y> <x> <y> ...
//
//   Route
//     route <station> <station> ...      (may span several records)
//
//   Layout
//     layout <stage>
//     station <id> <x> <y>
//     path <connection> <x> <y> <x> <y> ...

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shapemap/network.hpp"
#include "shapemap/route_matching.hpp"

namespace shapemap {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Shortest text that reads back to the same double.
std::string format_number(double v);

/// Throws ParseError on malformed records and ValidationError when the
/// parsed network fails validate().
TransitNetwork parse_network(std::string_view text);
std::string emit_network(const TransitNetwork& net);

/// Throws ParseError on malformed records, a polyline with fewer than two
/// points, or a document without polylines.
GuideShape parse_shape(std::string_view text);
std::string emit_shape(const GuideShape& shape);

std::vector<std::string> parse_route(std::string_view text);
std::string emit_route(const std::vector<std::string>& stations);

/// Station positions and drawn connection geometry of one stage.
struct LayoutDocument {
  std::string stage;
  std::vector<std::pair<std::string, Point>> stations;
  std::vector<std::pair<std::string, std::vector<Point>>> paths;

  bool operator==(const LayoutDocument&) const = default;
};

/// Layout of `net` with straight connections.
LayoutDocument make_layout(const std::string& stage, const TransitNetwork& net,
                           const std::vector<Point>& positions);
/// Layout of `net` with the given per-connection geometry.
LayoutDocument make_layout(const std::string& stage, const TransitNetwork& net,
                           const std::vector<Point>& positions,
                           const std::vector<std::vector<Point>>& paths);

LayoutDocument parse_layout(std::string_view text);
std::string emit_layout(const LayoutDocument& layout);

/// Whole file as a string. Throws std::runtime_error naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

}  // namespace shapemap
