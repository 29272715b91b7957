#pragma once

// TripleDocument: the on-disk format for (M, F, ample point) instances.
// Integers are decimal strings throughout, so documents never depend on a
// parser's word size; emit -> parse -> emit is byte-identical.

#include <k3frob/ample_cone.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace k3frob {

struct MalformedInputError : std::runtime_error {
  std::string field;
  MalformedInputError(std::string f, const std::string& why)
      : std::runtime_error("malformed input at \"" + f + "\": " + why), field(std::move(f)) {}
};

struct TripleDocument {
  WeilParams params;
  bool claims_k3 = true;
  Lattice lattice;
  IntMatrix frob;
  RatVector ample_point;
};

namespace detail {

using Json = nlohmann::ordered_json;

inline Int parse_int(const Json& j, const std::string& field) {
  if (!j.is_string()) throw MalformedInputError(field, "expected a decimal string");
  const std::string s = j.get<std::string>();
  try {
    return Int(s);
  } catch (const std::invalid_argument&) {
    throw MalformedInputError(field, "not a decimal integer: " + s);
  }
}

inline IntMatrix parse_matrix(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw MalformedInputError(field, "expected an array of rows");
  std::size_t rows = j.size(), cols = j[0].size();
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw MalformedInputError(field, "ragged rows");
    for (std::size_t k = 0; k < cols; ++k)
      m(i, k) = parse_int(j[i][k], field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  return m;
}

inline Json emit_matrix(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).get_str());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline TripleDocument parse_triple(const std::string& text) {
  detail::Json j;
  try {
    j = detail::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedInputError("document", e.what());
  }
  auto require = [&](const char* f) -> const detail::Json& {
    if (!j.contains(f)) throw MalformedInputError(f, "missing field");
    return j.at(f);
  };
  {
    Int fv = detail::parse_int(require("format_version"), "format_version");
    if (fv != 1) throw MalformedInputError("format_version", "unsupported version");
  }
  Int p = detail::parse_int(require("p"), "p");
  Int aI = detail::parse_int(require("a"), "a");
  Int q = detail::parse_int(require("q"), "q");
  if (aI <= 0 || !aI.fits_ulong_p()) throw MalformedInputError("a", "must be a small positive integer");
  WeilParams params;
  try {
    params = WeilParams(p, aI.get_ui());
  } catch (const std::domain_error& e) {
    throw MalformedInputError("p", e.what());
  }
  if (params.q != q) throw MalformedInputError("q", "q != p^a");
  const auto& ck = require("claims_k3");
  if (!ck.is_boolean()) throw MalformedInputError("claims_k3", "expected a boolean");

  IntMatrix gram = detail::parse_matrix(require("gram"), "gram");
  if (!gram.is_square()) throw MalformedInputError("gram", "not square");
  if (!gram.is_symmetric()) throw MalformedInputError("gram", "not symmetric");
  IntMatrix frob = detail::parse_matrix(require("frobenius"), "frobenius");
  if (!frob.is_square() || frob.rows() != gram.rows())
    throw MalformedInputError("frobenius", "dimension mismatch with gram");

  const auto& ap = require("ample_point");
  if (!ap.is_array() || ap.size() != gram.rows())
    throw MalformedInputError("ample_point", "dimension mismatch with gram");
  std::vector<Int> num(ap.size());
  for (std::size_t i = 0; i < ap.size(); ++i)
    num[i] = detail::parse_int(ap[i], "ample_point[" + std::to_string(i) + "]");
  Int den = detail::parse_int(require("ample_point_denominator"), "ample_point_denominator");
  if (den <= 0) throw MalformedInputError("ample_point_denominator", "must be positive");

  TripleDocument doc;
  doc.params = std::move(params);
  doc.claims_k3 = ck.get<bool>();
  doc.lattice = Lattice(std::move(gram));
  doc.frob = std::move(frob);
  doc.ample_point = RatVector(std::move(num), std::move(den));
  return doc;
}

inline std::string emit_triple(const TripleDocument& doc) {
  detail::Json j;
  j["format_version"] = "1";
  j["p"] = doc.params.p.get_str();
  j["a"] = Int(doc.params.a).get_str();
  j["q"] = doc.params.q.get_str();
  j["claims_k3"] = doc.claims_k3;
  j["gram"] = detail::emit_matrix(doc.lattice.gram);
  j["frobenius"] = detail::emit_matrix(doc.frob);
  detail::Json ap = detail::Json::array();
  for (const auto& x : doc.ample_point.num) ap.push_back(x.get_str());
  j["ample_point"] = std::move(ap);
  j["ample_point_denominator"] = doc.ample_point.den.get_str();
  return j.dump(2) + "\n";
}

inline TripleDocument load_triple(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInputError("document", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_triple(ss.str());
}

}  // namespace k3frob
