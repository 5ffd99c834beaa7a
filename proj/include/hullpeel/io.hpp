#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hullpeel/analysis.hpp"
#include "hullpeel/error.hpp"
#include "hullpeel/geom.hpp"
#include "hullpeel/peel.hpp"
#include "hullpeel/ppp.hpp"
#include "hullpeel/rng.hpp"
#include "hullpeel/spectral.hpp"

namespace hullpeel::io {

using nlohmann::json;

/// Shortest round-trip-safe text for CSV cells: 17 significant digits.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Spectral measures: {"atoms": [{"angle": a, "weight": w}, ...]} or {"uniform": true}

inline SpectralMeasure measure_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "uniform") return SpectralMeasure::uniform();
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "measure must be a JSON object");
  if (j.contains("uniform")) {
    if (!j.at("uniform").is_boolean() || !j.at("uniform").get<bool>())
      throw Error(ErrorKind::InvalidArgument, "\"uniform\" must be true");
    return SpectralMeasure::uniform();
  }
  if (!j.contains("atoms") || !j.at("atoms").is_array())
    throw Error(ErrorKind::InvalidArgument, "measure needs \"atoms\" array or \"uniform\": true");
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) {
    if (!a.is_object() || !a.contains("angle") || !a.contains("weight") || !a.at("angle").is_number() ||
        !a.at("weight").is_number())
      throw Error(ErrorKind::InvalidArgument, "each atom needs numeric \"angle\" and \"weight\"");
    atoms.push_back({a.at("angle").get<double>(), a.at("weight").get<double>()});
  }
  return SpectralMeasure::atomic(atoms);
}

inline json measure_to_json(const SpectralMeasure& m) {
  if (!m.is_atomic()) return json{{"uniform", true}};
  json atoms = json::array();
  for (std::size_t i = 0; i < m.size(); ++i)
    atoms.push_back({{"angle", m.directions()[i].angle}, {"weight", m.weights()[i]}});
  return json{{"atoms", atoms}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
}

/// "uniform" or a path to a measure JSON file.
inline SpectralMeasure load_measure(const std::string& spec) {
  if (spec == "uniform") return SpectralMeasure::uniform();
  return measure_from_json(read_json_file(spec));
}

// ---------------------------------------------------------------------------
// Points

inline void write_points_csv(std::ostream& os, std::span<const ProcessPoint> points) {
  os << "j,gamma,norm,angle,x,y\n";
  for (std::size_t j = 0; j < points.size(); ++j) {
    const ProcessPoint& p = points[j];
    os << (j + 1) << ',' << format_double(p.gamma) << ',' << format_double(p.norm) << ','
       << format_double(p.direction.angle) << ',' << format_double(p.pos.x) << ',' << format_double(p.pos.y) << '\n';
  }
}

inline json points_metadata(const ProcessConfig& config, std::size_t n_points) {
  return json{{"alpha", config.alpha},
              {"measure", measure_to_json(config.measure)},
              {"seed", config.seed},
              {"rng_name", std::string(RngStream::algorithm_name)},
              {"n_points", n_points}};
}

// ---------------------------------------------------------------------------
// Layers

inline void write_layers_csv(std::ostream& os, std::span<const LayerRecord> layers) {
  os << "k,n_vertices,perimeter,area,rho,kappa,n_points_consumed\n";
  for (const LayerRecord& l : layers) {
    os << l.k << ',' << l.n_vertices << ',' << format_double(l.perimeter) << ',' << format_double(l.area) << ','
       << format_double(l.rho) << ',' << (l.kappa ? format_double(*l.kappa) : std::string()) << ','
       << l.n_points_consumed << '\n';
  }
}

inline json polygon_to_json(const ConvexPolygon& p) {
  json a = json::array();
  for (Point v : p.vertices()) a.push_back({v.x, v.y});
  return a;
}

inline ConvexPolygon polygon_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "polygon must be an array of [x, y] pairs");
  std::vector<Point> v;
  for (const auto& q : j) {
    if (!q.is_array() || q.size() != 2 || !q[0].is_number() || !q[1].is_number())
      throw Error(ErrorKind::InvalidArgument, "polygon vertex must be [x, y]");
    v.push_back({q[0].get<double>(), q[1].get<double>()});
  }
  return ConvexPolygon(std::move(v));
}

inline json layers_polygons_json(std::span<const LayerRecord> layers) {
  json out = json::array();
  for (const LayerRecord& l : layers) out.push_back({{"k", l.k}, {"vertices", polygon_to_json(l.polygon)}});
  return out;
}

// ---------------------------------------------------------------------------
// SVG

struct SvgLayer {
  ConvexPolygon polygon;
  std::string label;
};

struct SvgOptions {
  bool overlay_unit_circle = false;
  double size_px = 640.0;
  bool dashed = true;
};

/// Polygons (and optionally the unit circle) with a viewBox fitted to the
/// data.  y is flipped so the picture has the usual orientation.
inline void write_svg(std::ostream& os, std::span<const SvgLayer> layers, const SvgOptions& opt = {}) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  auto grow = [&](Point p) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, -p.y);
    hi_y = std::max(hi_y, -p.y);
  };
  for (const auto& l : layers)
    for (Point v : l.polygon.vertices()) grow(v);
  if (opt.overlay_unit_circle) {
    grow({-1, -1});
    grow({1, 1});
  }
  if (!(lo_x <= hi_x)) lo_x = lo_y = -1, hi_x = hi_y = 1;
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-300});
  const double pad = 0.05 * span;
  const double stroke = span / 400.0;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.size_px << "\" height=\"" << opt.size_px
     << "\" viewBox=\"" << format_double(lo_x - pad) << ' ' << format_double(lo_y - pad) << ' '
     << format_double(span + 2 * pad) << ' ' << format_double(span + 2 * pad) << "\">\n";
  if (opt.overlay_unit_circle)
    os << "  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" stroke-width=\""
       << format_double(stroke) << "\"/>\n";
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::size_t c = 0;
  for (const auto& l : layers) {
    os << "  <polygon fill=\"none\" stroke=\"" << palette[c++ % 6] << "\" stroke-width=\"" << format_double(stroke)
       << '"';
    if (opt.dashed) os << " stroke-dasharray=\"" << format_double(4 * stroke) << ' ' << format_double(2 * stroke) << '"';
    os << " points=\"";
    for (std::size_t i = 0; i < l.polygon.size(); ++i) {
      if (i) os << ' ';
      os << format_double(l.polygon[i].x) << ',' << format_double(-l.polygon[i].y);
    }
    os << "\"><title>" << l.label << "</title></polygon>\n";
  }
  os << "</svg>\n";
}

}  // namespace hullpeel::io
