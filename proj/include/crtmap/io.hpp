#pragma once

#include <cstdint>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crtmap/circle_tree.hpp"
#include "crtmap/estimators.hpp"
#include "crtmap/excursion.hpp"
#include "crtmap/lamination.hpp"
#include "crtmap/planar_map.hpp"
#include "crtmap/snake.hpp"

namespace crtmap::io {

using Json = nlohmann::ordered_json;

inline constexpr int format_version = 1;

// Echoed into every output: {format_version, config, seed}.
struct RunHeader {
  Json config = Json::object();
  std::uint64_t seed = 0;

  Json to_json() const {
    Json j;
    j["format_version"] = format_version;
    j["config"] = config;
    j["seed"] = seed;
    return j;
  }
};

inline Json with_header(const RunHeader& header, Json payload) {
  Json j = header.to_json();
  for (auto& [key, value] : payload.items()) j[key] = value;
  return j;
}

inline void check_version(const Json& j) {
  if (!j.contains("format_version") || j["format_version"].get<int>() != format_version) {
    throw std::runtime_error("unsupported or missing format_version");
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << text;
  if (!file) throw std::runtime_error("write failed for " + path);
}

inline std::string read_text(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

inline void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(1) + "\n"); }

inline Json read_json(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

// First line of every CSV file.
inline std::string csv_header_line(const RunHeader& header) { return "# " + header.to_json().dump() + "\n"; }

inline Json excursion_to_json(const DiscreteExcursion& e, const RunHeader& header) {
  Json payload;
  payload["n"] = e.n;
  payload["steps"] = e.steps;
  return with_header(header, payload);
}

inline DiscreteExcursion excursion_from_json(const Json& j) {
  check_version(j);
  auto e = DiscreteExcursion::from_steps(j.at("steps").get<std::vector<int>>(), j.at("seed").get<std::uint64_t>());
  if (e.n != j.at("n").get<std::size_t>()) throw std::invalid_argument("excursion file: n disagrees with steps");
  return e;
}

inline Json labels_to_json(const LabelFunction& z, const RunHeader& header) {
  Json payload;
  payload["law"] = std::string(law_name(z.law));
  payload["values"] = z.values;
  Json j = with_header(header, payload);
  j["seed"] = z.seed;
  return j;
}

inline LabelFunction labels_from_json(const Json& j) {
  check_version(j);
  LabelFunction z;
  z.values = j.at("values").get<std::vector<int>>();
  z.law = parse_law(j.at("law").get<std::string>());
  z.seed = j.at("seed").get<std::uint64_t>();
  return z;
}

inline Json tree_to_json(const CircleTree& tree, const RunHeader& header) {
  Json payload;
  payload["n_vertices"] = tree.n_vertices();
  payload["parent"] = tree.parent;
  payload["class_of_time"] = tree.class_id;
  return with_header(header, payload);
}

inline Json map_to_json(const PlanarMap& map, const RunHeader& header) {
  Json payload;
  payload["k"] = map.k;
  payload["n_faces"] = map.n_faces;
  payload["root"] = map.root;
  payload["next"] = map.next;
  payload["opp"] = map.opp;
  return with_header(header, payload);
}

// Rebuilds vertex ids from the rotation; throws when the result fails the structural audit.
inline PlanarMap map_from_json(const Json& j) {
  check_version(j);
  PlanarMap map;
  map.k = j.at("k").get<int>();
  map.n_faces = j.at("n_faces").get<std::size_t>();
  map.root = j.at("root").get<std::uint32_t>();
  map.next = j.at("next").get<std::vector<std::uint32_t>>();
  map.opp = j.at("opp").get<std::vector<std::uint32_t>>();
  if (map.opp.size() != map.next.size()) throw std::invalid_argument("map file: next/opp size mismatch");
  for (auto h : map.next) {
    if (h >= map.next.size()) throw std::invalid_argument("map file: next entry out of range");
  }
  assign_vertices(map);
  const auto audit = audit_map(map);
  if (!audit.ok) throw std::invalid_argument("map file: " + audit.failure);
  return map;
}

inline std::string chords_csv(const Lamination& lam, const RunHeader& header) {
  std::ostringstream out;
  out << csv_header_line(header);
  write_chords_csv(lam, out);
  return out.str();
}

inline std::string dimension_csv(const DimensionEstimate& est, const RunHeader& header) {
  std::ostringstream out;
  out << csv_header_line(header) << "scale,count\n";
  char buf[96];
  for (std::size_t i = 0; i < est.scales.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%zu\n", est.scales[i], est.counts[i]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "slope,%.6f\n", est.slope);
  out << buf;
  return out.str();
}

// Rows of a statistics table; cells are written verbatim.
inline std::string stats_csv(const RunHeader& header, const std::vector<std::string>& columns,
                             const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  out << csv_header_line(header);
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  return out.str();
}

// Distance rows as little-endian int64, row-major; shape and provenance go to a JSON sidecar.
inline void write_distance_rows(const std::string& path, std::span<const std::vector<std::int64_t>> rows,
                                const Json& sidecar) {
  std::string bytes;
  for (const auto& row : rows) {
    for (std::int64_t v : row) {
      auto u = static_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((u >> (8 * b)) & 0xffu));
    }
  }
  write_text(path, bytes);
  write_json(path + ".json", sidecar);
}

inline std::vector<std::int64_t> read_distance_rows(const std::string& path) {
  const std::string bytes = read_text(path);
  if (bytes.size() % 8 != 0) throw std::runtime_error(path + ": truncated distance file");
  std::vector<std::int64_t> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 * i + b])) << (8 * b);
    out[i] = static_cast<std::int64_t>(u);
  }
  return out;
}

}  // namespace crtmap::io
