#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "flatlab/origami.hpp"
#include "flatlab/surface.hpp"

namespace flatlab {

using json = nlohmann::json;

namespace detail {

inline json number(double x, bool exact) {
  if (exact) return static_cast<long long>(x);
  return x;
}

template <class T>
T get_field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace detail

/// {"exact": bool, "half_edges": [{"vector": [x, y], "twin": i, "next": j}],
///  "marked": [half-edge ids], "area_scale": s}
/// Integer vectors are written as JSON integers in exact mode; floating values
/// use the shortest round-trip decimal form.
inline json to_json(const TranslationSurface& s) {
  json doc;
  doc["exact"] = s.exact();
  json hes = json::array();
  for (const auto& e : s.half_edges())
    hes.push_back({{"vector", {detail::number(e.vector.x, s.exact()), detail::number(e.vector.y, s.exact())}},
                   {"twin", e.twin},
                   {"next", e.next}});
  doc["half_edges"] = std::move(hes);
  const auto marked = s.marked_half_edges();
  if (!marked.empty()) doc["marked"] = marked;
  if (s.area_scale() != 1.0) doc["area_scale"] = s.area_scale();
  return doc;
}

inline TranslationSurface surface_from_json(const json& doc) {
  const bool exact = detail::get_field<bool>(doc, "exact");
  const auto hes = detail::get_field<json>(doc, "half_edges");
  if (!hes.is_array()) throw Error(ErrorKind::ParseError, "'half_edges' must be an array");
  std::vector<HalfEdgeRecord> records;
  records.reserve(hes.size());
  for (const auto& e : hes) {
    const auto v = detail::get_field<std::vector<double>>(e, "vector");
    if (v.size() != 2) throw Error(ErrorKind::ParseError, "vector must have two components");
    records.push_back({{v[0], v[1]}, detail::get_field<int>(e, "twin"), detail::get_field<int>(e, "next")});
  }
  std::vector<int> marked;
  if (doc.contains("marked")) marked = detail::get_field<std::vector<int>>(doc, "marked");
  const double scale = doc.contains("area_scale") ? detail::get_field<double>(doc, "area_scale") : 1.0;
  try {
    return TranslationSurface::build(std::move(records), exact, std::move(marked), scale);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw Error(ErrorKind::ValidationError, e.what());
  }
}

inline std::string serialize(const TranslationSurface& s) { return to_json(s).dump(); }
inline TranslationSurface deserialize(const std::string& text) { return surface_from_json(detail::parse_text(text)); }

/// {"n": N, "h": [...], "v": [...]}, 0-indexed.
inline json to_json(const Origami& o) { return {{"n", o.n_squares}, {"h", o.h}, {"v", o.v}}; }

inline Origami origami_from_json(const json& doc) {
  const int n = detail::get_field<int>(doc, "n");
  auto h = detail::get_field<Permutation>(doc, "h");
  auto v = detail::get_field<Permutation>(doc, "v");
  if (static_cast<int>(h.size()) != n || static_cast<int>(v.size()) != n)
    throw Error(ErrorKind::ValidationError, "origami arrays must have length n");
  return Origami(std::move(h), std::move(v));
}

inline bool is_origami_document(const json& doc) { return doc.is_object() && doc.contains("h") && doc.contains("v"); }

/// Reads either a surface or an origami document.
inline TranslationSurface load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const json doc = detail::parse_text(ss.str());
  if (is_origami_document(doc)) return build_from_origami(origami_from_json(doc));
  return surface_from_json(doc);
}

}  // namespace flatlab
