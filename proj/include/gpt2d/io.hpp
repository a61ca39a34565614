#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gpt2d/forward.hpp"
#include "gpt2d/geometry.hpp"
#include "gpt2d/inversion.hpp"

namespace gpt2d {

using Json = nlohmann::json;

namespace detail {

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected complex as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

// ---- ConformalMap: {"gamma": g, "a0": [re, im], "coeffs": [[re, im], ...]} ----

inline Json to_json(const ConformalMap& m) {
  Json j;
  j["gamma"] = m.gamma;
  j["a0"] = detail::complex_to_json(m.a0);
  Json cs = Json::array();
  for (const Complex& c : m.coeffs) cs.push_back(detail::complex_to_json(c));
  j["coeffs"] = cs;
  return j;
}

inline ConformalMap conformal_map_from_json(const Json& j) {
  ConformalMap m;
  m.gamma = j.at("gamma").get<double>();
  m.a0 = detail::complex_from_json(j.at("a0"));
  for (const Json& c : j.at("coeffs")) m.coeffs.push_back(detail::complex_from_json(c));
  m.validate();
  return m;
}

// ---- ShapeSpec: {"shape": "kite", "nodes": 512, ...} ----

inline Json to_json(const ShapeSpec& s) {
  Json j;
  j["shape"] = shape_name(s.shape);
  j["nodes"] = s.nodes;
  if (s.has_corners()) j["corner_depth"] = s.corner_depth;
  if (s.shape == Shape::disk) {
    j["center"] = detail::complex_to_json(s.center);
    j["radius"] = s.radius;
  }
  if (s.shape == Shape::from_conformal) j["map"] = to_json(s.map);
  return j;
}

inline ShapeSpec shape_spec_from_json(const Json& j) {
  ShapeSpec s;
  s.shape = shape_from_name(j.at("shape").get<std::string>());
  if (j.contains("nodes")) s.nodes = j.at("nodes").get<int>();
  if (j.contains("corner_depth")) s.corner_depth = j.at("corner_depth").get<int>();
  if (j.contains("center")) s.center = detail::complex_from_json(j.at("center"));
  if (j.contains("radius")) s.radius = j.at("radius").get<double>();
  if (j.contains("map")) s.map = conformal_map_from_json(j.at("map"));
  s.validate();
  return s;
}

// ---- GptSet measurement file ----
// JSON: {"ord": n, "provenance": tag, "N1": [[re,im], ...] row-major, "N2": ...}
// CSV:  header then one row per (m, n, re, im, matrix-tag)

namespace detail {

inline Json cmat_to_json(const CMat& a) {
  Json rows = Json::array();
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) rows.push_back(complex_to_json(a(i, j)));
  return rows;
}

inline CMat cmat_from_json(const Json& j, int ord) {
  if (static_cast<int>(j.size()) != ord * ord)
    throw ConfigError("GPT matrix length does not match ord^2");
  CMat a(ord, ord);
  int k = 0;
  for (int i = 0; i < ord; ++i)
    for (int jj = 0; jj < ord; ++jj) a(i, jj) = complex_from_json(j[k++]);
  return a;
}

}  // namespace detail

inline const char* provenance_name(GptProvenance p) {
  switch (p) {
    case GptProvenance::nystrom: return "nystrom";
    case GptProvenance::analytic: return "analytic";
    case GptProvenance::measured_file: return "measured-file";
  }
  return "?";
}

inline Json to_json(const GptSet& g) {
  Json j;
  j["ord"] = g.ord;
  j["provenance"] = provenance_name(g.provenance);
  j["N1"] = detail::cmat_to_json(g.N1);
  j["N2"] = detail::cmat_to_json(g.N2);
  return j;
}

inline GptSet gpt_from_json(const Json& j) {
  GptSet g;
  g.ord = j.at("ord").get<int>();
  if (g.ord < 1) throw ConfigError("measurement file: ord must be >= 1");
  g.provenance = GptProvenance::measured_file;
  g.N1 = detail::cmat_from_json(j.at("N1"), g.ord);
  g.N2 = detail::cmat_from_json(j.at("N2"), g.ord);
  return g;
}

inline void write_gpt_csv(std::ostream& os, const GptSet& g) {
  os << "m,n,re,im,matrix\n";
  for (int tag = 1; tag <= 2; ++tag) {
    const CMat& a = tag == 1 ? g.N1 : g.N2;
    for (int m = 1; m <= g.ord; ++m)
      for (int n = 1; n <= g.ord; ++n)
        os << m << ',' << n << ',' << detail::fmt17(a(m - 1, n - 1).real()) << ','
           << detail::fmt17(a(m - 1, n - 1).imag()) << ",N" << tag << '\n';
  }
}

inline GptSet gpt_from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("measurement CSV: empty file");
  if (line != "m,n,re,im,matrix" && line != "m,n,re,im,matrix\r")
    throw ConfigError("measurement CSV: bad header: " + line);
  struct Entry {
    int m, n, tag;
    Complex v;
  };
  std::vector<Entry> entries;
  int ord = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 5> field;
    size_t pos = 0;
    for (int k = 0; k < 5; ++k) {
      const size_t next = k < 4 ? line.find(',', pos) : line.size();
      if (next == std::string::npos) throw ConfigError("measurement CSV: bad row: " + line);
      field[k] = line.substr(pos, next - pos);
      pos = next + 1;
    }
    Entry e;
    try {
      e.m = std::stoi(field[0]);
      e.n = std::stoi(field[1]);
      e.v = {std::stod(field[2]), std::stod(field[3])};
    } catch (const std::exception&) {
      throw ConfigError("measurement CSV: bad row: " + line);
    }
    if (field[4] == "N1")
      e.tag = 1;
    else if (field[4] == "N2")
      e.tag = 2;
    else
      throw ConfigError("measurement CSV: bad matrix tag: " + field[4]);
    if (e.m < 1 || e.n < 1) throw ConfigError("measurement CSV: indices must be >= 1");
    entries.push_back(e);
    ord = std::max({ord, e.m, e.n});
  }
  if (ord < 1) throw ConfigError("measurement CSV: no data rows");
  GptSet g;
  g.ord = ord;
  g.provenance = GptProvenance::measured_file;
  g.N1 = CMat::Zero(ord, ord);
  g.N2 = CMat::Zero(ord, ord);
  for (const Entry& e : entries) (e.tag == 1 ? g.N1 : g.N2)(e.m - 1, e.n - 1) = e.v;
  return g;
}

// ---- curve CSV: t, x, y, nx, ny, weight ----

inline void write_curve_csv(std::ostream& os, const BoundaryCurve& c) {
  os << "t,x,y,nx,ny,weight\n";
  for (int j = 0; j < c.size(); ++j)
    os << detail::fmt17(c.params[j]) << ',' << detail::fmt17(c.nodes(j).real()) << ','
       << detail::fmt17(c.nodes(j).imag()) << ',' << detail::fmt17(c.normals(j).real()) << ','
       << detail::fmt17(c.normals(j).imag()) << ',' << detail::fmt17(c.weights(j)) << '\n';
}

// ---- ReconstructionResult ----

inline Json to_json(const ReconstructionResult& r) {
  Json j;
  j["lambda_rec"] = r.lambda_rec;
  j["sigma_rec"] = r.sigma_rec;
  j["map"] = to_json(r.map_rec);
  j["iterations"] = r.iterations;
  j["residual_trace"] = r.residual_trace;
  j["n2_condition"] = r.n2_condition;
  j["lambda_imag_residual"] = r.lambda_imag_residual;
  j["flags"] = {{"converged", r.converged},
                {"damped", r.damped},
                {"n2_ill_conditioned", r.n2_ill_conditioned},
                {"suspect_lambda", r.suspect_lambda},
                {"left_unit_interval", r.left_unit_interval}};
  return j;
}

// ---- small file helpers ----

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f << text;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Reads a measurement file, JSON or CSV, by extension then by sniffing.
inline GptSet read_measurement_file(const std::string& path) {
  const std::string text = read_text_file(path);
  const bool looks_json = text.find_first_not_of(" \t\r\n") != std::string::npos &&
                          text[text.find_first_not_of(" \t\r\n")] == '{';
  if (!looks_json) {
    std::istringstream is(text);
    return gpt_from_csv(is);
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("measurement file: JSON parse error: ") + e.what());
  }
  return gpt_from_json(j);
}

}  // namespace gpt2d
