#include "shapemap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace shapemap {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

struct Record {
  std::size_t line;
  std::string_view raw;
  std::vector<Token> tokens;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<Record> records(std::string_view text) {
  std::vector<Record> out;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++line;
    Record r{line, raw, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && is_space(raw[i])) ++i;
      if (i >= raw.size()) break;
      std::size_t j = i;
      while (j < raw.size() && !is_space(raw[j])) ++j;
      r.tokens.push_back({raw.substr(i, j - i), i + 1});
      i = j;
    }
    if (!r.tokens.empty() && r.tokens[0].text.front() != '#') out.push_back(std::move(r));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

[[noreturn]] void fail(const Record& r, std::size_t column, const std::string& what) {
  throw ParseError(r.line, column, what);
}

void need(const Record& r, std::size_t count, const char* what) {
  if (r.tokens.size() < count) {
    std::size_t col = r.raw.size() + 1;
    fail(r, col, std::string("missing ") + what);
  }
}

double number(const Record& r, const Token& t) {
  double v = 0.0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  if (!t.text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    fail(r, t.column, "expected a finite number, got '" + std::string(t.text) + "'");
  }
  return v;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Rgb color(const Record& r, const Token& t) {
  std::string_view s = t.text;
  if (s.size() != 7 || s[0] != '#') fail(r, t.column, "expected a #rrggbb color");
  std::uint8_t c[3];
  for (int k = 0; k < 3; ++k) {
    int hi = hex_digit(s[1 + 2 * k]), lo = hex_digit(s[2 + 2 * k]);
    if (hi < 0 || lo < 0) fail(r, t.column, "expected a #rrggbb color");
    c[k] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return {c[0], c[1], c[2]};
}

std::string hex(Rgb c) {
  static const char* digits = "0123456789abcdef";
  std::string out = "#";
  for (std::uint8_t v : {c.r, c.g, c.b}) {
    out += digits[v >> 4];
    out += digits[v & 15];
  }
  return out;
}

std::vector<Point> points(const Record& r, std::size_t from) {
  if ((r.tokens.size() - from) % 2 != 0) {
    fail(r, r.tokens.back().column, "odd number of coordinates");
  }
  std::vector<Point> out;
  for (std::size_t k = from; k + 1 < r.tokens.size(); k += 2) {
    out.push_back({number(r, r.tokens[k]), number(r, r.tokens[k + 1])});
  }
  return out;
}

void append_points(std::string& out, const std::vector<Point>& pts) {
  for (Point p : pts) {
    out += ' ';
    out += format_number(p.x);
    out += ' ';
    out += format_number(p.y);
  }
}

std::string str(std::string_view s) { return std::string(s); }

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid network:";
        for (const auto& v : violations) msg += "\n  " + v.subject + ": " + v.message;
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// _____________________________________________________________________________
TransitNetwork parse_network(std::string_view text) {
  TransitNetwork net;
  for (const Record& r : records(text)) {
    std::string_view kind = r.tokens[0].text;
    if (kind == "station") {
      need(r, 4, "station id and coordinates");
      Station s;
      s.id = str(r.tokens[1].text);
      s.pos = {number(r, r.tokens[2]), number(r, r.tokens[3])};
      std::size_t k = 4;
      for (; k < r.tokens.size(); ++k) {
        std::string_view t = r.tokens[k].text;
        if (t == "@planarization") {
          s.kind = StationKind::DummyPlanarization;
        } else if (t == "@shortcut") {
          s.kind = StationKind::DummyShortcut;
        } else if (t.substr(0, 8) == "@origin=" && t.size() > 8) {
          s.origin = str(t.substr(8));
        } else if (t.front() == '@') {
          fail(r, r.tokens[k].column, "unknown station tag '" + str(t) + "'");
        } else {
          break;
        }
      }
      if (k < r.tokens.size()) {
        std::string_view name = r.raw.substr(r.tokens[k].column - 1);
        while (!name.empty() && is_space(name.back())) name.remove_suffix(1);
        s.name = str(name);
      }
      net.add_station(std::move(s));
    } else if (kind == "connection") {
      need(r, 5, "connection id, endpoints and lines");
      if (r.tokens.size() > 6) fail(r, r.tokens[6].column, "unexpected token");
      Connection c;
      c.id = str(r.tokens[1].text);
      c.from = str(r.tokens[2].text);
      c.to = str(r.tokens[3].text);
      std::string_view lines = r.tokens[4].text;
      if (lines != "-") {
        std::size_t pos = 0;
        while (true) {
          std::size_t comma = lines.find(',', pos);
          std::string_view id = lines.substr(pos, comma == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : comma - pos);
          if (id.empty()) fail(r, r.tokens[4].column + pos, "empty line id");
          c.lines.insert(str(id));
          if (comma == std::string_view::npos) break;
          pos = comma + 1;
        }
      }
      if (r.tokens.size() == 6) {
        std::string_view t = r.tokens[5].text;
        if (t == "@shortcut") {
          c.kind = ConnectionKind::DummyShortcut;
        } else if (t == "@auxiliary") {
          c.kind = ConnectionKind::Auxiliary;
        } else {
          fail(r, r.tokens[5].column, "unknown connection kind '" + str(t) + "'");
        }
      }
      auto a = net.station_index(c.from), b = net.station_index(c.to);
      if (a && b && net.connection_between(*a, *b)) {
        fail(r, r.tokens[2].column, "second connection between '" + c.from +
                                        "' and '" + c.to + "'");
      }
      net.add_connection(std::move(c));
    } else if (kind == "line") {
      need(r, 3, "line id and color");
      Line l;
      l.id = str(r.tokens[1].text);
      l.color = color(r, r.tokens[2]);
      for (std::size_t k = 3; k < r.tokens.size(); ++k) {
        l.stations.push_back(str(r.tokens[k].text));
      }
      net.add_line(std::move(l));
    } else {
      fail(r, r.tokens[0].column, "unknown record '" + str(kind) + "'");
    }
  }
  auto violations = validate(net);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return net;
}

std::string emit_network(const TransitNetwork& net) {
  std::string out;
  for (const auto& s : net.stations()) {
    out += "station " + s.id + ' ' + format_number(s.pos.x) + ' ' + format_number(s.pos.y);
    if (s.kind == StationKind::DummyPlanarization) out += " @planarization";
    if (s.kind == StationKind::DummyShortcut) out += " @shortcut";
    if (!s.origin.empty()) out += " @origin=" + s.origin;
    if (!s.name.empty()) out += ' ' + s.name;
    out += '\n';
  }
  for (const auto& c : net.connections()) {
    out += "connection " + c.id + ' ' + c.from + ' ' + c.to + ' ';
    if (c.lines.empty()) {
      out += '-';
    } else {
      bool first = true;
      for (const auto& l : c.lines) {
        if (!first) out += ',';
        out += l;
        first = false;
      }
    }
    if (c.kind == ConnectionKind::DummyShortcut) out += " @shortcut";
    if (c.kind == ConnectionKind::Auxiliary) out += " @auxiliary";
    out += '\n';
  }
  for (const auto& l : net.lines()) {
    out += "line " + l.id + ' ' + hex(l.color);
    for (const auto& s : l.stations) out += ' ' + s;
    out += '\n';
  }
  return out;
}

// _____________________________________________________________________________
GuideShape parse_shape(std::string_view text) {
  std::vector<Polyline> lines;
  std::size_t last_line = 0;
  for (const Record& r : records(text)) {
    last_line = r.line;
    if (r.tokens[0].text != "polyline") {
      fail(r, r.tokens[0].column, "unknown record '" + str(r.tokens[0].text) + "'");
    }
    need(r, 2, "open or closed");
    std::string_view mode = r.tokens[1].text;
    if (mode != "open" && mode != "closed") {
      fail(r, r.tokens[1].column, "expected open or closed");
    }
    auto pts = points(r, 2);
    if (pts.size() < 2) fail(r, r.tokens[0].column, "polyline needs at least 2 points");
    for (std::size_t k = 1; k < pts.size(); ++k) {
      if (pts[k] == pts[k - 1]) {
        fail(r, r.tokens[2 + 2 * k].column, "repeated point");
      }
    }
    lines.emplace_back(std::move(pts), mode == "closed");
  }
  if (lines.empty()) throw ParseError(last_line + 1, 1, "shape has no polyline");
  return GuideShape(std::move(lines));
}

std::string emit_shape(const GuideShape& shape) {
  std::string out;
  for (const auto& l : shape.polylines()) {
    out += l.closed() ? "polyline closed" : "polyline open";
    append_points(out, l.vertices());
    out += '\n';
  }
  return out;
}

std::vector<std::string> parse_route(std::string_view text) {
  std::vector<std::string> out;
  for (const Record& r : records(text)) {
    if (r.tokens[0].text != "route") {
      fail(r, r.tokens[0].column, "unknown record '" + str(r.tokens[0].text) + "'");
    }
    for (std::size_t k = 1; k < r.tokens.size(); ++k) out.push_back(str(r.tokens[k].text));
  }
  if (out.size() < 2) throw ParseError(1, 1, "route needs at least 2 stations");
  return out;
}

std::string emit_route(const std::vector<std::string>& stations) {
  std::string out = "route";
  for (const auto& s : stations) out += ' ' + s;
  return out + '\n';
}

// _____________________________________________________________________________
LayoutDocument make_layout(const std::string& stage, const TransitNetwork& net,
                           const std::vector<Point>& positions) {
  std::vector<std::vector<Point>> paths;
  for (std::size_t c = 0; c < net.connections().size(); ++c) {
    paths.push_back({positions[net.from_index(c)], positions[net.to_index(c)]});
  }
  return make_layout(stage, net, positions, paths);
}

LayoutDocument make_layout(const std::string& stage, const TransitNetwork& net,
                           const std::vector<Point>& positions,
                           const std::vector<std::vector<Point>>& paths) {
  LayoutDocument doc;
  doc.stage = stage;
  for (std::size_t s = 0; s < net.stations().size(); ++s) {
    doc.stations.emplace_back(net.stations()[s].id, positions[s]);
  }
  for (std::size_t c = 0; c < net.connections().size(); ++c) {
    doc.paths.emplace_back(net.connections()[c].id, paths[c]);
  }
  return doc;
}

LayoutDocument parse_layout(std::string_view text) {
  LayoutDocument doc;
  bool header = false;
  for (const Record& r : records(text)) {
    std::string_view kind = r.tokens[0].text;
    if (kind == "layout") {
      if (header) fail(r, 1, "second layout header");
      need(r, 2, "stage name");
      doc.stage = str(r.tokens[1].text);
      header = true;
    } else if (!header) {
      fail(r, 1, "expected layout header");
    } else if (kind == "station") {
      need(r, 4, "station id and coordinates");
      if (r.tokens.size() > 4) fail(r, r.tokens[4].column, "unexpected token");
      doc.stations.emplace_back(str(r.tokens[1].text),
                                Point{number(r, r.tokens[2]), number(r, r.tokens[3])});
    } else if (kind == "path") {
      need(r, 6, "connection id and at least two points");
      doc.paths.emplace_back(str(r.tokens[1].text), points(r, 2));
    } else {
      fail(r, r.tokens[0].column, "unknown record '" + str(kind) + "'");
    }
  }
  if (!header) throw ParseError(1, 1, "expected layout header");
  return doc;
}

std::string emit_layout(const LayoutDocument& layout) {
  std::string out = "layout " + layout.stage + '\n';
  for (const auto& [id, p] : layout.stations) {
    out += "station " + id + ' ' + format_number(p.x) + ' ' + format_number(p.y) + '\n';
  }
  for (const auto& [id, pts] : layout.paths) {
    out += "path " + id;
    append_points(out, pts);
    out += '\n';
  }
  return out;
}

// _____________________________________________________________________________
std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace shapemap
