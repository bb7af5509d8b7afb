#pragma once

// File formats. Every rational travels as a string "p" or "p/q" so that
// reading and writing are bit-exact.
//
//   basis:    {"n": 2, "basis": [["1", "1/2"], ["0", "1/2"]]}   row-major
//   target:   {"t": ["1/4", "0"]}
//   VR cache: {"basis_hash": "...", "n": 2, "vr": [["1", "0"], ...]}
//   trace:    one {"alpha": "p/q", "edge": [...], "phase": "B"} per line

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vorcvp/errors.hpp"
#include "vorcvp/lattice.hpp"
#include "vorcvp/navigation.hpp"
#include "vorcvp/scalar.hpp"
#include "vorcvp/voronoi.hpp"

namespace vorcvp {

using Json = nlohmann::ordered_json;

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed for " + path);
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

inline Json read_json_file(const std::string& path) { return parse_json(read_text_file(path), path); }

// FNV-1a, 64 bit, as 16 lowercase hex digits.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Scalar scalar_from_json(const Json& j) {
  if (j.is_string()) return parse_scalar(j.get<std::string>());
  if (j.is_number_integer()) return Scalar(to_integer(j.get<std::int64_t>()));
  throw InputError("rational entries must be strings \"p\" or \"p/q\" (or integers)");
}

inline Json vec_to_json(std::span<const Scalar> v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

inline Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of rationals");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(scalar_from_json(e));
  return v;
}

inline Json coeffs_to_json(std::span<const std::int64_t> a) {
  Json out = Json::array();
  for (auto x : a) out.push_back(x);
  return out;
}

inline Json basis_to_json(const LatticeBasis& basis) {
  Json rows = Json::array();
  for (const auto& r : basis.rows()) rows.push_back(vec_to_json(r));
  Json j;
  j["n"] = basis.dim();
  j["basis"] = std::move(rows);
  return j;
}

inline LatticeBasis basis_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("basis")) throw InputError("basis file needs a \"basis\" array");
  const Json& rows = j.at("basis");
  if (!rows.is_array() || rows.empty()) throw InputError("\"basis\" must be a nonempty array of rows");
  std::vector<Vec> r;
  for (const auto& row : rows) r.push_back(vec_from_json(row));
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer() || j.at("n").get<std::int64_t>() != static_cast<std::int64_t>(r.size()))
      throw InputError("\"n\" does not match the number of rows");
  }
  return LatticeBasis::from_rows(r);
}

// One row per line.
inline std::string basis_to_string(const LatticeBasis& basis) {
  const Json j = basis_to_json(basis);
  std::string out = "{\n  \"n\": " + std::to_string(basis.dim()) + ",\n  \"basis\": [\n";
  const auto& rows = j.at("basis");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += "    " + rows[i].dump();
    out += i + 1 < rows.size() ? ",\n" : "\n";
  }
  return out + "  ]\n}\n";
}

// Hash of the canonical serialization, so formatting of the source file
// does not matter.
inline std::string basis_hash(const LatticeBasis& basis) { return fnv1a_hex(basis_to_json(basis).dump()); }

inline LatticeBasis read_basis_file(const std::string& path) { return basis_from_json(read_json_file(path)); }

inline Json target_to_json(std::span<const Scalar> t) {
  Json j;
  j["t"] = vec_to_json(t);
  return j;
}

inline Vec target_from_json(const Json& j) {
  if (j.is_array()) return vec_from_json(j);
  if (!j.is_object() || !j.contains("t")) throw InputError("target file needs a \"t\" array");
  return vec_from_json(j.at("t"));
}

// "1/2,1/3" or "[\"1/2\", \"1/3\"]".
inline Vec parse_vector_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t");
  if (first != std::string::npos && text[first] == '[') return vec_from_json(parse_json(text, "vector"));
  Vec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    v.push_back(parse_scalar(b == std::string::npos ? std::string() : item.substr(b, e - b + 1)));
  }
  if (v.empty()) throw InputError("empty vector");
  return v;
}

inline Json vr_cache_to_json(const VoronoiCellData& cell) {
  Json vr = Json::array();
  for (const auto& r : cell.vr()) {
    Json c = Json::array();
    for (auto x : r.coeffs) c.push_back(std::to_string(x));
    vr.push_back(std::move(c));
  }
  Json j;
  j["basis_hash"] = basis_hash(cell.basis());
  j["n"] = cell.dim();
  j["vr"] = std::move(vr);
  return j;
}

// Rejects caches written for another basis; coordinates are recomputed.
inline VoronoiCellData vr_cache_from_json(const LatticeBasis& basis, const Json& j) {
  if (!j.is_object() || !j.contains("vr") || !j.contains("basis_hash")) throw InputError("malformed VR cache");
  if (j.at("basis_hash") != basis_hash(basis)) throw InputError("VR cache was written for a different basis");
  if (j.contains("n") && j.at("n") != basis.dim()) throw InputError("VR cache dimension mismatch");
  std::vector<IntVec> coeffs;
  for (const auto& row : j.at("vr")) {
    if (!row.is_array()) throw InputError("malformed VR cache row");
    IntVec a;
    for (const auto& e : row) {
      const Scalar s = scalar_from_json(e);
      if (s.get_den() != 1) throw InputError("VR cache coefficients must be integers");
      a.push_back(to_int64(s.get_num()));
    }
    coeffs.push_back(std::move(a));
  }
  return cell_from_coeffs(basis, coeffs);
}

inline Json lattice_point_to_json(const LatticePoint& p) {
  Json j;
  j["coeffs"] = coeffs_to_json(p.coeffs);
  j["coords"] = vec_to_json(p.coords);
  return j;
}

inline std::string trace_to_jsonl(const VoronoiCellData& cell, const PathTrace& trace) {
  std::string out;
  for (const auto& e : trace.events) {
    Json j;
    j["alpha"] = to_string(e.alpha);
    j["edge"] = coeffs_to_json(cell[e.edge].coeffs);
    j["phase"] = phase_name(e.phase);
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace vorcvp
