#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

#include "gpt2d/conformal.hpp"
#include "gpt2d/types.hpp"

namespace gpt2d {

enum class Shape { kite, starfish, cap, perturbed_ellipse, disk, from_conformal };

enum class Smoothness { analytic, piecewise_smooth_with_corners };

struct ShapeSpec {
  Shape shape = Shape::kite;
  int nodes = 512;
  int corner_depth = 12;   // dyadic refinement levels toward each corner
  Complex center{0.0, 0.0};  // disk
  double radius = 1.0;       // disk
  ConformalMap map;          // from_conformal

  bool has_corners() const { return shape == Shape::cap || shape == Shape::perturbed_ellipse; }

  void validate() const {
    if (nodes < 16) throw ConfigError("ShapeSpec: node count must be >= 16");
    if (!has_corners() && !detail::is_pow2(nodes))
      throw ConfigError("ShapeSpec: node count must be a power of 2 for smooth shapes");
    if (corner_depth < 1) throw ConfigError("ShapeSpec: corner_depth must be >= 1");
    if (shape == Shape::disk && !(radius > 0.0)) throw ConfigError("ShapeSpec: disk radius must be positive");
    if (shape == Shape::from_conformal) map.validate();
  }
};

inline const char* shape_name(Shape s) {
  switch (s) {
    case Shape::kite: return "kite";
    case Shape::starfish: return "starfish";
    case Shape::cap: return "cap";
    case Shape::perturbed_ellipse: return "perturbed_ellipse";
    case Shape::disk: return "disk";
    case Shape::from_conformal: return "from_conformal";
  }
  return "?";
}

inline Shape shape_from_name(const std::string& s) {
  if (s == "kite") return Shape::kite;
  if (s == "starfish") return Shape::starfish;
  if (s == "cap") return Shape::cap;
  if (s == "perturbed_ellipse") return Shape::perturbed_ellipse;
  if (s == "disk") return Shape::disk;
  if (s == "from_conformal") return Shape::from_conformal;
  throw ConfigError("unknown shape variant: " + s);
}

/// Discretized Jordan curve, parameter-ordered counterclockwise over [0,2pi).
/// weights are arclength quadrature weights (parameter measure times |z'|).
struct BoundaryCurve {
  std::vector<double> params;
  CVec nodes;
  CVec derivatives;  // z'(t) per unit parameter
  CVec normals;      // outward unit normals
  RVec curvature;    // signed, 1/length
  RVec weights;
  Smoothness smoothness = Smoothness::analytic;
  std::vector<double> corners;  // parameter locations, empty for smooth shapes

  int size() const { return static_cast<int>(nodes.size()); }
  double total_arclength() const { return weights.sum(); }
  double max_radius() const { return nodes.cwiseAbs().maxCoeff(); }

  double diameter() const {
    double d = 0.0;
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j) d = std::max(d, std::abs(nodes(i) - nodes(j)));
    return d;
  }

  Complex centroid() const { return nodes.sum() / static_cast<double>(size()); }
};

namespace detail {

struct PointData {
  Complex z, zp, zpp;
};

inline PointData kite_point(double t) {
  const double c = std::cos(t), s = std::sin(t);
  const double c2 = std::cos(2 * t), s2 = std::sin(2 * t);
  return {{c + 0.65 * c2, 1.5 * s}, {-s - 1.3 * s2, 1.5 * c}, {-c - 2.6 * c2, -1.5 * s}};
}

inline PointData starfish_point(double t) {
  const double r = 1.0 + 0.25 * std::cos(5 * t);
  const double rp = -1.25 * std::sin(5 * t);
  const double rpp = -6.25 * std::cos(5 * t);
  const Complex e{std::cos(t), std::sin(t)};
  const Complex i{0.0, 1.0};
  return {r * e, (rp + i * r) * e, (rpp + 2.0 * i * rp - r) * e};
}

inline PointData disk_point(double t, Complex center, double radius) {
  const Complex e{std::cos(t), std::sin(t)};
  return {center + radius * e, radius * Complex{0.0, 1.0} * e, -radius * e};
}

inline PointData conformal_point(const ConformalMap& map, double t, int truncation) {
  const int m = truncation < 0 ? static_cast<int>(map.coeffs.size())
                               : std::min<int>(truncation, static_cast<int>(map.coeffs.size()));
  const Complex i{0.0, 1.0};
  const Complex w = map.gamma * Complex{std::cos(t), std::sin(t)};
  Complex z = w + map.a0, zp = i * w, zpp = -w;
  Complex wn{1.0, 0.0};
  for (int n = 1; n <= m; ++n) {
    wn *= w;
    const Complex term = map.coeffs[n - 1] / wn;
    z += term;
    zp += -i * static_cast<double>(n) * term;
    zpp += -static_cast<double>(n) * static_cast<double>(n) * term;
  }
  return {z, zp, zpp};
}

// Cap-shape constants as printed with the boundary parameterization; the
// native parameter s in [0,1) is rescaled to t = 2*pi*s.
struct CapConstants {
  double a, b, c, t1, t2;
};

inline const CapConstants& cap_constants() {
  static const CapConstants k = [] {
    CapConstants v{};
    v.a = 0.5 - std::asin(std::sinh(0.5)) / (2 * pi);
    v.b = v.a - 1.0 / (4 * pi) - std::sqrt(2.0) / 8 +
          std::sqrt(2.0) / (2 * pi) * std::asin(std::sqrt(2.0) / 2 * std::cos(2 * pi * v.a));
    v.c = 9.0 / 8 - v.b;
    v.t1 = 1.0 / (8 * v.c);
    v.t2 = v.t1 + (v.a - v.b) / v.c;
    return v;
  }();
  return k;
}

inline PointData cap_point(double t) {
  const auto& k = cap_constants();
  const double s = t / (2 * pi);
  const Complex i{0.0, 1.0};
  PointData p;
  if (s < k.t1) {
    const double th = 4 * pi * k.c * s;
    const Complex e{std::cos(th), std::sin(th)};
    p.z = Complex{-0.5 * std::sin(th) - std::sqrt(2.0) * pi / 4, -0.5 + 0.5 * std::cos(th)};
    p.zp = -2 * pi * k.c * e;
    p.zpp = -8 * pi * pi * k.c * k.c * i * e;
  } else if (s < k.t2) {
    p.z = Complex{2 * pi * k.c * (s - k.t2) -
                      std::sqrt(2.0) * std::asin(std::sqrt(2.0) / 2 * std::cos(2 * pi * k.a)),
                  -0.5};
    p.zp = Complex{2 * pi * k.c, 0.0};
    p.zpp = Complex{0.0, 0.0};
  } else {
    const double th = 2 * pi * k.c * (s - k.t2) + 2 * pi * k.a;
    const double thp = 2 * pi * k.c;
    const double ct = std::cos(th), st = std::sin(th);
    const double q = std::sqrt(1.0 - 0.5 * ct * ct);
    p.z = Complex{-std::sqrt(2.0) * std::asin(std::sqrt(2.0) / 2 * ct), -std::asinh(st)};
    p.zp = Complex{thp * st / q, -thp * ct / (std::sqrt(2.0) * q)};
    p.zpp = Complex{thp * thp * ct / (2 * q * q * q), thp * thp * st / (std::sqrt(2.0) * q * q * q)};
  }
  // chain rule for the [0,1) -> [0,2pi) rescaling
  p.zp /= 2 * pi;
  p.zpp /= 4 * pi * pi;
  return p;
}

struct PerturbedEllipseConstants {
  double a, b, t0, c0;
};

inline const PerturbedEllipseConstants& pe_constants() {
  static const PerturbedEllipseConstants k = [] {
    PerturbedEllipseConstants v{};
    v.a = 1.0;
    v.b = 7.0 / 3.0;
    v.t0 = std::asin(1.0 / (4 * v.b * std::sqrt(2.0)));
    v.c0 = std::sqrt(1.0 - 1.0 / (32 * v.b * v.b)) + 1.0 / (4 * std::sqrt(2.0));
    return v;
  }();
  return k;
}

inline PointData pe_point(double t) {
  const auto& k = pe_constants();
  const double sx = (k.a * std::cos(k.t0) - k.c0) / k.t0;
  const double sy = k.b * std::sin(k.t0) / k.t0;
  PointData p;
  if (t < k.t0) {
    p.z = Complex{sx * t + k.c0, sy * t};
    p.zp = Complex{sx, sy};
    p.zpp = Complex{0.0, 0.0};
  } else if (t < 2 * pi - k.t0) {
    p.z = Complex{k.a * std::cos(t), k.b * std::sin(t)};
    p.zp = Complex{-k.a * std::sin(t), k.b * std::cos(t)};
    p.zpp = Complex{-k.a * std::cos(t), -k.b * std::sin(t)};
  } else {
    const double u = 2 * pi - t;
    p.z = Complex{sx * u + k.c0, -sy * u};
    p.zp = Complex{-sx, sy};
    p.zpp = Complex{0.0, 0.0};
  }
  return p;
}

inline PointData eval_point(const ShapeSpec& spec, double t) {
  switch (spec.shape) {
    case Shape::kite: return kite_point(t);
    case Shape::starfish: return starfish_point(t);
    case Shape::cap: return cap_point(t);
    case Shape::perturbed_ellipse: return pe_point(t);
    case Shape::disk: return disk_point(t, spec.center, spec.radius);
    case Shape::from_conformal: return conformal_point(spec.map, t, -1);
  }
  throw ConfigError("eval_point: unknown shape variant");
}

inline std::vector<double> corner_params(const ShapeSpec& spec) {
  if (spec.shape == Shape::cap) {
    const auto& k = cap_constants();
    return {0.0, 2 * pi * k.t1, 2 * pi * k.t2};
  }
  if (spec.shape == Shape::perturbed_ellipse) {
    const auto& k = pe_constants();
    return {0.0, k.t0, 2 * pi - k.t0};
  }
  return {};
}

// 16-point Gauss-Legendre rule on [-1,1] (positive half; rule is symmetric).
inline constexpr std::array<double, 8> gauss16_x = {
    9.50125098376374544e-02, 2.81603550779258915e-01, 4.58016777657227370e-01,
    6.17876244402643771e-01, 7.55404408355002999e-01, 8.65631202387831755e-01,
    9.44575023073232600e-01, 9.89400934991649939e-01};
inline constexpr std::array<double, 8> gauss16_w = {
    1.89450610455068585e-01, 1.82603415044923612e-01, 1.69156519395002619e-01,
    1.49595988816576764e-01, 1.24628971255534030e-01, 9.51585116824925914e-02,
    6.22535239386477063e-02, 2.71524594117540374e-02};
inline constexpr int gauss16_size = 16;

inline void gauss16(double lo, double hi, std::vector<double>& x, std::vector<double>& w) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int i = 7; i >= 0; --i) {
    x.push_back(mid - half * gauss16_x[i]);
    w.push_back(half * gauss16_w[i]);
  }
  for (int i = 0; i < 8; ++i) {
    x.push_back(mid + half * gauss16_x[i]);
    w.push_back(half * gauss16_w[i]);
  }
}

// Panels for one smooth piece [a,b] with corners at both ends: `base`
// uniform panels whose first and last are dyadically refined to `depth`.
inline std::vector<std::pair<double, double>> graded_panels(double a, double b, int base,
                                                            int depth) {
  std::vector<std::pair<double, double>> panels;
  const double h = (b - a) / base;
  std::vector<double> cuts;
  cuts.push_back(a);
  for (int k = depth; k >= 1; --k) cuts.push_back(a + h / std::pow(2.0, k));
  for (int i = 1; i < base; ++i) cuts.push_back(a + i * h);
  for (int k = 1; k <= depth; ++k) cuts.push_back(b - h / std::pow(2.0, k));
  cuts.push_back(b);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) panels.emplace_back(cuts[i], cuts[i + 1]);
  return panels;
}

// Fills nodes/derivatives/normals/curvature/weights from parameter samples
// and per-unit-parameter quadrature weights.
inline BoundaryCurve assemble_curve(const ShapeSpec& spec, const std::vector<double>& params,
                                    const std::vector<double>& param_weights) {
  const int n = static_cast<int>(params.size());
  BoundaryCurve c;
  c.params = params;
  c.nodes.resize(n);
  c.derivatives.resize(n);
  c.normals.resize(n);
  c.curvature.resize(n);
  c.weights.resize(n);
  c.smoothness =
      spec.has_corners() ? Smoothness::piecewise_smooth_with_corners : Smoothness::analytic;
  c.corners = corner_params(spec);
  for (int j = 0; j < n; ++j) {
    const PointData p = eval_point(spec, params[j]);
    const double az = std::abs(p.zp);
    if (!(az > 0.0)) throw NumericalError("curve has a vanishing tangent");
    c.nodes(j) = p.z;
    c.derivatives(j) = p.zp;
    c.normals(j) = Complex{0.0, -1.0} * p.zp / az;  // tangent rotated by -pi/2
    c.curvature(j) = std::imag(std::conj(p.zp) * p.zpp) / (az * az * az);
    c.weights(j) = param_weights[j] * az;
  }
  return c;
}

// Winding number of the node polygon about a point (sum of turn angles / 2pi).
inline double winding_number(const CVec& nodes, Complex p) {
  double total = 0.0;
  const int n = static_cast<int>(nodes.size());
  for (int j = 0; j < n; ++j) {
    const Complex u = nodes(j) - p;
    const Complex v = nodes((j + 1) % n) - p;
    total += std::arg(v / u);
  }
  return total / (2 * pi);
}

}  // namespace detail

/// Builds the discretized boundary for a shape spec.  Smooth shapes use
/// equispaced nodes with trapezoidal weights; corner shapes use composite
/// 16-point Gauss panels dyadically graded toward each corner.  Diagnostics
/// go to `warn` when provided.
inline BoundaryCurve make_curve(const ShapeSpec& spec, std::ostream* warn = nullptr) {
  spec.validate();
  BoundaryCurve curve;

  if (!spec.has_corners()) {
    if (spec.corner_depth != 12 && warn)
      *warn << "make_curve: corner_depth ignored for smooth shape " << shape_name(spec.shape)
            << "\n";
    const int n = spec.nodes;
    const double h = 2 * pi / n;
    std::vector<double> params(n), pw(n, h);
    for (int j = 0; j < n; ++j) params[j] = j * h;
    curve = detail::assemble_curve(spec, params, pw);
  } else {
    const std::vector<double> corners = detail::corner_params(spec);
    const int pieces = static_cast<int>(corners.size());
    // arclength share per piece, from a coarse |z'| sample
    std::vector<double> len(pieces, 0.0);
    double len_total = 0.0;
    for (int i = 0; i < pieces; ++i) {
      const double a = corners[i];
      const double b = (i + 1 < pieces) ? corners[i + 1] : corners[0] + 2 * pi;
      for (int k = 0; k < 64; ++k) {
        const double t = a + (b - a) * (k + 0.5) / 64;
        len[i] += std::abs(detail::eval_point(spec, t).zp) * (b - a) / 64;
      }
      len_total += len[i];
    }
    const int d = spec.corner_depth;
    const int panels_target = std::max(spec.nodes / detail::gauss16_size, pieces * (2 * d + 2));
    const int base_total = std::max(2 * pieces, panels_target - 2 * d * pieces);
    std::vector<double> params, pw;
    for (int i = 0; i < pieces; ++i) {
      const double a = corners[i];
      const double b = (i + 1 < pieces) ? corners[i + 1] : corners[0] + 2 * pi;
      const int base =
          std::max(2, static_cast<int>(std::lround(base_total * len[i] / len_total)));
      for (const auto& [lo, hi] : detail::graded_panels(a, b, base, d))
        detail::gauss16(lo, hi, params, pw);
    }
    curve = detail::assemble_curve(spec, params, pw);
  }

  // the NP kernel sign convention requires counterclockwise orientation
  const double wind = detail::winding_number(curve.nodes, curve.centroid());
  if (wind < 0.0) {
    if (warn) *warn << "make_curve: clockwise parameterization detected, reversing\n";
    const int n = curve.size();
    BoundaryCurve r = curve;
    for (int j = 0; j < n; ++j) {
      const int k = n - 1 - j;
      r.params[j] = curve.params[k];
      r.nodes(j) = curve.nodes(k);
      r.derivatives(j) = -curve.derivatives(k);
      r.normals(j) = -curve.normals(k);
      r.curvature(j) = -curve.curvature(k);
      r.weights(j) = curve.weights(k);
    }
    curve = r;
  } else if (std::abs(wind - 1.0) > 0.01) {
    throw NumericalError("make_curve: curve is not simple at this resolution (winding " +
                         std::to_string(wind) + ")");
  }
  return curve;
}

/// Image of |w| = gamma under the truncated map: the Step-2 boundary
/// reconstruction.  No simplicity check; truncated recovered maps may
/// self-intersect at low orders.
inline BoundaryCurve map_boundary(const ConformalMap& map, int n_points, int truncation = -1) {
  if (n_points < 3) throw ConfigError("map_boundary: need at least 3 points");
  if (truncation > static_cast<int>(map.coeffs.size()))
    throw ConfigError("map_boundary: truncation exceeds stored coefficients");
  map.validate();
  BoundaryCurve c;
  const double h = 2 * pi / n_points;
  c.params.resize(n_points);
  c.nodes.resize(n_points);
  c.derivatives.resize(n_points);
  c.normals.resize(n_points);
  c.curvature.resize(n_points);
  c.weights.resize(n_points);
  c.smoothness = Smoothness::analytic;
  for (int j = 0; j < n_points; ++j) {
    const double t = j * h;
    const detail::PointData p = detail::conformal_point(map, t, truncation);
    const double az = std::abs(p.zp);
    c.params[j] = t;
    c.nodes(j) = p.z;
    c.derivatives(j) = p.zp;
    c.normals(j) = az > 0.0 ? Complex{0.0, -1.0} * p.zp / az : Complex{0.0, 0.0};
    c.curvature(j) = az > 0.0 ? std::imag(std::conj(p.zp) * p.zpp) / (az * az * az) : 0.0;
    c.weights(j) = h * az;
  }
  return c;
}

/// Discrete star-shape test: arg(z(t) - s0) strictly increasing over one
/// period.  Throws if s0 lies on or outside the curve.
inline bool is_star_shaped(const BoundaryCurve& curve, Complex s0) {
  if (curve.size() < 3) throw ConfigError("is_star_shaped: empty curve");
  double min_dist = std::numeric_limits<double>::max();
  for (int j = 0; j < curve.size(); ++j) min_dist = std::min(min_dist, std::abs(curve.nodes(j) - s0));
  if (min_dist < 1e-12 * std::max(1.0, curve.max_radius()))
    throw ConfigError("is_star_shaped: point lies on the curve");
  const double wind = detail::winding_number(curve.nodes, s0);
  if (std::abs(wind - 1.0) > 0.01)
    throw ConfigError("is_star_shaped: point lies outside the curve");
  const int n = curve.size();
  for (int j = 0; j < n; ++j) {
    const Complex u = curve.nodes(j) - s0;
    const Complex v = curve.nodes((j + 1) % n) - s0;
    if (std::arg(v / u) <= 0.0) return false;
  }
  return true;
}

/// Symmetric discrete Hausdorff distance between node sets.
inline double shape_distance(const BoundaryCurve& a, const BoundaryCurve& b) {
  if (a.size() == 0 || b.size() == 0) throw ConfigError("shape_distance: empty curve");
  auto one_sided = [](const CVec& p, const CVec& q) {
    double worst = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      double best = std::numeric_limits<double>::max();
      for (int j = 0; j < q.size(); ++j) best = std::min(best, std::abs(p(i) - q(j)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a.nodes, b.nodes), one_sided(b.nodes, a.nodes));
}

}  // namespace gpt2d
