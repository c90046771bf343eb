#include "carnot/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace carnot {

namespace {

std::string strip(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// split at top-level commas (commas inside parentheses stay put)
std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(strip(cur));
  return out;
}

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  for (const char* fn : {"sin", "cos", "tan", "exp", "ln", "sqrt"})
    if (s == fn) return false;
  return true;
}

double parse_bound(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (strip(s.substr(used)).empty()) return v;
  } catch (...) {
  }
  // fall back to the expression grammar for exact rationals like -1/2
  try {
    std::vector<std::string> none;
    Expr e = parse_expr(s, none);
    if (e.is_num()) return eval(e, std::span<const double>{});
  } catch (...) {
  }
  throw ManifestError("domain bound '" + s + "' is not a number", line);
}

}  // namespace

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  enum Section { None, Manifold, Frame, Domain } section = None;
  bool have_coords = false, have_x1 = false, have_x2 = false;
  std::string x1_raw, x2_raw;
  int x1_line = 0, x2_line = 0;
  std::vector<std::pair<std::string, std::pair<std::array<double, 2>, int>>> domain_lines;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line == "[manifold]")
        section = Manifold;
      else if (line == "[frame]")
        section = Frame;
      else if (line == "[domain]")
        section = Domain;
      else
        throw ManifestError("unknown section " + line, lineno);
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos) throw ManifestError("expected key = value", lineno);
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));

    switch (section) {
      case None:
        throw ManifestError("key '" + key + "' outside any section", lineno);
      case Manifold: {
        if (key == "name") {
          m.name = value;
        } else if (key == "coords") {
          std::vector<std::string> cs = split_commas(value);
          if (cs.size() != 3) throw ManifestError("coords must list exactly three names", lineno);
          for (int i = 0; i < 3; ++i) {
            if (!valid_identifier(cs[static_cast<std::size_t>(i)]))
              throw ManifestError("invalid coordinate name '" + cs[static_cast<std::size_t>(i)] + "'",
                                  lineno);
            m.chart.coords[static_cast<std::size_t>(i)] = cs[static_cast<std::size_t>(i)];
          }
          have_coords = true;
        } else if (key == "seed") {
          m.seed = std::stoull(value, nullptr, 0);
        } else if (key == "tol") {
          m.tol = parse_bound(value, lineno);
        } else {
          throw ManifestError("unknown [manifold] key '" + key + "'", lineno);
        }
        break;
      }
      case Frame: {
        if (key == "X1") {
          x1_raw = value;
          x1_line = lineno;
          have_x1 = true;
        } else if (key == "X2") {
          x2_raw = value;
          x2_line = lineno;
          have_x2 = true;
        } else {
          throw ManifestError("unknown [frame] key '" + key + "' (expected X1 or X2)", lineno);
        }
        break;
      }
      case Domain: {
        auto dots = value.find("..");
        if (dots == std::string::npos)
          throw ManifestError("domain line must read <coord> = <lo> .. <hi>", lineno);
        double lo = parse_bound(strip(value.substr(0, dots)), lineno);
        double hi = parse_bound(strip(value.substr(dots + 2)), lineno);
        if (!(lo < hi)) throw ManifestError("domain bounds must satisfy lo < hi", lineno);
        domain_lines.push_back({key, {{lo, hi}, lineno}});
        break;
      }
    }
  }

  if (!have_coords) throw ManifestError("missing coords in [manifold]", 0);
  if (!have_x1 || !have_x2) throw ManifestError("missing X1 or X2 in [frame]", 0);
  if (m.name.empty()) m.name = "unnamed";

  auto parse_field = [&m](const std::string& raw_fields, int line) {
    std::vector<std::string> parts = split_commas(raw_fields);
    if (parts.size() != 3)
      throw ManifestError("frame field needs exactly three comma-separated expressions", line);
    VectorField v;
    for (int k = 0; k < 3; ++k) {
      try {
        v.e[static_cast<std::size_t>(k)] = parse_expr(parts[static_cast<std::size_t>(k)],
                                                      m.chart.names());
      } catch (const ParseError& e) {
        throw ManifestError(std::string("component ") + std::to_string(k + 1) + ": " + e.what(),
                            line);
      }
    }
    return v;
  };
  m.x1 = parse_field(x1_raw, x1_line);
  m.x2 = parse_field(x2_raw, x2_line);

  for (const auto& [coord, range_line] : domain_lines) {
    int idx = m.chart.index_of(coord);
    if (idx < 0) throw ManifestError("domain names unknown coordinate '" + coord + "'",
                                     range_line.second);
    m.chart.box.ranges[static_cast<std::size_t>(idx)] = range_line.first;
  }
  return m;
}

SubRiemannianStructure Manifest::build(ZeroTestOptions base) const {
  if (seed) base.seed = *seed;
  if (tol) base.tol = *tol;
  return SubRiemannianStructure::build(chart, x1, x2, base);
}

std::optional<std::string> bundled_manifest_text(const std::string& name) {
  if (name == "heisenberg")
    return std::string(
        "[manifold]\n"
        "name = heisenberg\n"
        "coords = x1, x2, x3\n"
        "[frame]\n"
        "X1 = 1, 0, -(1/2)*x2\n"
        "X2 = 0, 1, (1/2)*x1\n"
        "[domain]\n"
        "x1 = -1 .. 1\n"
        "x2 = -1 .. 1\n"
        "x3 = -1 .. 1\n");
  if (name == "rototranslation")
    return std::string(
        "[manifold]\n"
        "name = rototranslation\n"
        "coords = x1, x2, x3\n"
        "[frame]\n"
        "X1 = cos(x3), sin(x3), 0\n"
        "X2 = 0, 0, 1\n"
        "[domain]\n"
        "x1 = -1 .. 1\n"
        "x2 = -1 .. 1\n"
        "x3 = -1 .. 1\n");
  if (name == "heisenberg-rotated")
    return std::string(
        "[manifold]\n"
        "name = heisenberg-rotated\n"
        "coords = x1, x2, x3\n"
        "[frame]\n"
        "X1 = cos(x1), sin(x1), (1/2)*x1*sin(x1) - (1/2)*x2*cos(x1)\n"
        "X2 = -sin(x1), cos(x1), (1/2)*x1*cos(x1) + (1/2)*x2*sin(x1)\n"
        "[domain]\n"
        "x1 = -1 .. 1\n"
        "x2 = -1 .. 1\n"
        "x3 = -1 .. 1\n");
  return std::nullopt;
}

Manifest load_manifest(const std::string& path_or_name) {
  if (auto text = bundled_manifest_text(path_or_name)) return parse_manifest(*text);
  std::ifstream in(path_or_name);
  if (!in) throw ManifestError("cannot open manifest '" + path_or_name + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

}  // namespace carnot
