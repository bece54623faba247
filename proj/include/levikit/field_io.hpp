#pragma once

// JSON container and CSV export for gridded fields.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "levikit/field.hpp"

namespace levikit {

using Json = nlohmann::json;

/// Shortest round-trip text for a double ("%.17g").
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Json regularity_to_json(const Regularity& r) {
  return {{"tag", to_string(r.kind)}, {"alpha", r.alpha}, {"constant", r.constant}};
}

inline Regularity regularity_from_json(const Json& j) {
  Regularity r;
  r.kind = regularity_kind_from_string(j.at("tag").get<std::string>());
  r.alpha = j.value("alpha", 1.0);
  r.constant = j.value("constant", 0.0);
  return r;
}

/// Self-describing container: header (origin, spacing, extents, regularity)
/// followed by the row-major values.
inline Json to_json(const ScalarField3& f) {
  const Grid3& g = f.grid();
  return {{"kind", "ScalarField3"},
          {"origin", g.origin()},
          {"spacing", g.spacing()},
          {"extents", g.extents()},
          {"regularity", regularity_to_json(f.regularity())},
          {"values", f.values()}};
}

inline ScalarField3 scalar_field_from_json(const Json& j) {
  if (j.value("kind", "") != "ScalarField3") throw ParameterError("JSON container is not a ScalarField3");
  Grid3 g(j.at("origin").get<Point3>(), j.at("spacing").get<double>(), j.at("extents").get<std::array<int, 3>>());
  return ScalarField3(g, j.at("values").get<std::vector<double>>(), regularity_from_json(j.at("regularity")));
}

/// CSV with one row per node: xi1,xi2,xi3,value.
inline void write_csv(std::ostream& os, const ScalarField3& f) {
  os << "xi1,xi2,xi3,value\n";
  const Grid3& g = f.grid();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Point3 p = g.coord(g.node(idx));
    os << format_double(p[0]) << ',' << format_double(p[1]) << ',' << format_double(p[2]) << ','
       << format_double(f.values()[idx]) << '\n';
  }
}

/// Disc fields store only the defined nodes, as [i, j, value] triples.
inline Json to_json(const DiscField& d) {
  Json nodes = Json::array();
  for (int i = -d.half(); i <= d.half(); ++i) {
    for (int j = -d.half(); j <= d.half(); ++j) {
      if (d.inside(i, j)) nodes.push_back({i, j, d(i, j)});
    }
  }
  return {{"kind", "DiscField"}, {"radius", d.radius()}, {"spacing", d.spacing()}, {"nodes", std::move(nodes)}};
}

inline DiscField disc_field_from_json(const Json& j) {
  if (j.value("kind", "") != "DiscField") throw ParameterError("JSON container is not a DiscField");
  DiscField d(j.at("radius").get<double>(), j.at("spacing").get<double>());
  for (const auto& n : j.at("nodes")) d.set(n.at(0).get<int>(), n.at(1).get<int>(), n.at(2).get<double>());
  return d;
}

inline void write_csv(std::ostream& os, const DiscField& d) {
  os << "x,y,value\n";
  for (int i = -d.half(); i <= d.half(); ++i) {
    for (int j = -d.half(); j <= d.half(); ++j) {
      if (!d.inside(i, j)) continue;
      const Complex z = d.coord(i, j);
      os << format_double(z.real()) << ',' << format_double(z.imag()) << ',' << format_double(d(i, j)) << '\n';
    }
  }
}

}  // namespace levikit
