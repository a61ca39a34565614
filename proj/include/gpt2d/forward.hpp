#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

#include "gpt2d/conformal.hpp"
#include "gpt2d/geometry.hpp"
#include "gpt2d/types.hpp"

namespace gpt2d {

/// Conductivities and the contrast lambda = (sc+sm)/(2(sc-sm)).
/// lambda = +1/2 for a perfectly conducting inclusion, -1/2 for insulating.
struct Material {
  double sigma_c = 2.0;
  double sigma_m = 1.0;
  double lambda = 1.5;

  static Material from_sigma(double sc, double sm) {
    if (!(sm > 0.0) || sm == std::numeric_limits<double>::infinity())
      throw ConfigError("Material: sigma_m must be positive and finite");
    if (sc < 0.0) throw ConfigError("Material: sigma_c must be nonnegative");
    if (sc == sm) throw ConfigError("Material: sigma_c must differ from sigma_m");
    Material m;
    m.sigma_c = sc;
    m.sigma_m = sm;
    if (sc == std::numeric_limits<double>::infinity())
      m.lambda = 0.5;
    else if (sc == 0.0)
      m.lambda = -0.5;
    else
      m.lambda = (sc + sm) / (2 * (sc - sm));
    return m;
  }

  static Material from_lambda(double lam, double sm = 1.0) {
    if (!(sm > 0.0)) throw ConfigError("Material: sigma_m must be positive");
    if (std::abs(lam) < 0.5) throw ConfigError("Material: |lambda| must be >= 1/2");
    Material m;
    m.lambda = lam;
    m.sigma_m = sm;
    if (lam == 0.5)
      m.sigma_c = std::numeric_limits<double>::infinity();
    else if (lam == -0.5)
      m.sigma_c = 0.0;
    else
      m.sigma_c = sm * (2 * lam + 1) / (2 * lam - 1);
    return m;
  }

  bool extreme() const { return lambda == 0.5 || lambda == -0.5; }
};

enum class GptProvenance { nystrom, analytic, measured_file };

/// Truncated complex contracted GPT matrices N^(1), N^(2).
struct GptSet {
  int ord = 0;
  CMat N1;
  CMat N2;
  GptProvenance provenance = GptProvenance::measured_file;

  GptSet truncated(int new_ord) const {
    if (new_ord < 1 || new_ord > ord) throw ConfigError("GptSet: bad truncation order");
    return {new_ord, N1.topLeftCorner(new_ord, new_ord), N2.topLeftCorner(new_ord, new_ord),
            provenance};
  }

  double n1_symmetry_residual() const {
    const double s = std::max(N1.cwiseAbs().maxCoeff(), 1e-300);
    return (N1 - N1.transpose()).cwiseAbs().maxCoeff() / s;
  }
  double n2_hermitian_residual() const {
    const double s = std::max(N2.cwiseAbs().maxCoeff(), 1e-300);
    return (N2 - N2.adjoint()).cwiseAbs().maxCoeff() / s;
  }
};

/// Faber polynomial polarization tensors.
struct FptSet {
  int ord = 0;
  CMat F1;
  CMat F2;
};

/// Nystrom discretization of the Neumann-Poincare operator K* on a curve:
/// K(i,j) = (1/2pi) <x_i - y_j, nu_i> / |x_i - y_j|^2 w_j off the diagonal
/// and the smooth-kernel limit kappa_i w_i / (4 pi) on it.
struct NpSystem {
  BoundaryCurve curve;
  RMat K;
};

inline NpSystem assemble_np(const BoundaryCurve& curve) {
  const int n = curve.size();
  if (n == 0) throw ConfigError("assemble_np: empty curve");
  NpSystem sys;
  sys.curve = curve;
  sys.K.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const Complex xi = curve.nodes(i);
    const Complex nui = curve.normals(i);
    for (int j = 0; j < n; ++j) {
      if (j == i) {
        sys.K(i, i) = curve.curvature(i) * curve.weights(i) / (4 * pi);
        continue;
      }
      const Complex d = xi - curve.nodes(j);
      const double r2 = std::norm(d);
      if (!(r2 > 0.0)) throw NumericalError("assemble_np: coincident nodes");
      sys.K(i, j) = std::real(d * std::conj(nui)) / r2 * curve.weights(j) / (2 * pi);
    }
  }
  return sys;
}

namespace detail {

// LU of (lambda I - K).  At lambda = +1/2 the operator has the equilibrium
// density in its kernel; a bordered system pins the mean-zero solution that
// the transmission problem selects.
struct NpResolvent {
  Eigen::PartialPivLU<RMat> lu;
  bool bordered = false;
  int n = 0;
  double lam = 0.0;

  NpResolvent(const NpSystem& sys, double lambda) {
    n = sys.K.rows();
    lam = lambda;
    if (std::abs(lambda) == 0.5) {
      bordered = true;
      RMat A = RMat::Zero(n + 1, n + 1);
      A.topLeftCorner(n, n) = lambda * RMat::Identity(n, n) - sys.K;
      A.block(0, n, n, 1) = sys.curve.weights;
      A.block(n, 0, 1, n) = sys.curve.weights.transpose();
      lu.compute(A);
    } else {
      lu.compute(lambda * RMat::Identity(n, n) - sys.K);
    }
  }

  CVec solve(const CVec& rhs) const {
    RMat b(bordered ? n + 1 : n, 2);
    b.setZero();
    b.col(0).head(n) = rhs.real();
    b.col(1).head(n) = rhs.imag();
    const RMat x = lu.solve(b);
    if (!x.allFinite())
      throw NumericalError("np resolvent: singular system at lambda = " + std::to_string(lam) +
                           " (" + std::to_string(n) + " nodes)");
    return x.col(0).head(n) + Complex{0.0, 1.0} * x.col(1).head(n);
  }
};

}  // namespace detail

/// GPTs by quadrature of the boundary-integral definition:
/// N^(1)_mn = sum_j z_j^n phi_m(z_j) w_j with (lambda I - K) phi_m = d(z^m)/dnu,
/// and d(conj z^m)/dnu for N^(2).
inline GptSet gpt_nystrom(const NpSystem& sys, const Material& mat, int ord,
                          std::ostream* warn = nullptr) {
  if (ord < 2) throw ConfigError("gpt_nystrom: ord must be >= 2");
  const int n = sys.K.rows();
  if (warn && ord > n / 8)
    *warn << "gpt_nystrom: ord " << ord << " is large for " << n << " nodes\n";

  const detail::NpResolvent res(sys, mat.lambda);
  const BoundaryCurve& c = sys.curve;

  CMat zpow(n, ord + 1);
  for (int j = 0; j < n; ++j) {
    zpow(j, 0) = 1.0;
    for (int k = 1; k <= ord; ++k) zpow(j, k) = zpow(j, k - 1) * c.nodes(j);
  }

  GptSet g;
  g.ord = ord;
  g.provenance = GptProvenance::nystrom;
  g.N1.resize(ord, ord);
  g.N2.resize(ord, ord);
  for (int m = 1; m <= ord; ++m) {
    CVec rhs(n);
    for (int j = 0; j < n; ++j)
      rhs(j) = static_cast<double>(m) * zpow(j, m - 1) * c.normals(j);  // d(z^m)/dnu
    const CVec phi1 = res.solve(rhs);
    const CVec phi2 = res.solve(rhs.conjugate());
    for (int nn = 1; nn <= ord; ++nn) {
      Complex s1{0.0, 0.0}, s2{0.0, 0.0};
      for (int j = 0; j < n; ++j) {
        const Complex zw = zpow(j, nn) * c.weights(j);
        s1 += zw * phi1(j);
        s2 += zw * phi2(j);
      }
      g.N1(m - 1, nn - 1) = s1;
      g.N2(m - 1, nn - 1) = s2;
    }
  }
  return g;
}

inline GptSet gpt_nystrom(const BoundaryCurve& curve, const Material& mat, int ord,
                          std::ostream* warn = nullptr) {
  return gpt_nystrom(assemble_np(curve), mat, ord, warn);
}

/// GPTs from the Grunsky factorization,
///   N^(1) = 4pi P^-1 g^N N^1/2 G [I + (1-4l^2)(4l^2 I - conj(G)G)^-1] N^1/2 g^N (P^T)^-1,
///   N^(2) = 8pi l conj(P)^-1 g^N N^1/2 [I + (1-4l^2)(...)^-1] N^1/2 g^N (P^T)^-1,
/// computed at working order ord+buffer and truncated.
inline GptSet gpt_analytic(const ConformalMap& map, const Material& mat, int ord,
                           int buffer = 10) {
  if (ord < 1) throw ConfigError("gpt_analytic: ord must be >= 1");
  if (buffer < 0) throw ConfigError("gpt_analytic: buffer must be >= 0");
  const int M = ord + buffer;
  const double lam = mat.lambda;

  const FaberMatrix fm = faber_matrix(map, M);
  const GrunskyTables gt = grunsky_tables(map, M);

  CMat middle;
  if (lam == 0.5 || lam == -0.5) {
    middle = CMat::Identity(M, M);
  } else {
    const CMat lhs = 4 * lam * lam * CMat::Identity(M, M) - gt.G.conjugate() * gt.G;
    Eigen::PartialPivLU<CMat> lu(lhs);
    const CMat inv = lu.solve(CMat::Identity(M, M));
    if (!inv.allFinite())
      throw NumericalError("gpt_analytic: (4 lambda^2 I - conj(G) G) is singular");
    middle = CMat::Identity(M, M) + (1 - 4 * lam * lam) * inv;
  }

  const RVec d = diag_gamma_n(map.gamma, M).cwiseProduct(diag_sqrt_n(M));
  const CMat X1 = 4 * pi * d.asDiagonal() * (gt.G * middle) * d.asDiagonal();
  const CMat X2 = 8 * pi * lam * d.asDiagonal() * middle * d.asDiagonal();

  const auto Plow = fm.P.triangularView<Eigen::Lower>();
  const auto Pconj = fm.P.conjugate();
  // N1 = P^-1 X1 P^-T ; N2 = conj(P)^-1 X2 P^-T
  CMat W1 = Plow.solve(X1);
  W1 = Plow.solve(W1.transpose().eval()).transpose();
  CMat W2 = Pconj.triangularView<Eigen::Lower>().solve(X2);
  W2 = Plow.solve(W2.transpose().eval()).transpose();

  GptSet g;
  g.ord = ord;
  g.provenance = GptProvenance::analytic;
  g.N1 = W1.topLeftCorner(ord, ord);
  g.N2 = W2.topLeftCorner(ord, ord);
  return g;
}

/// FPTs as printed:
///   F^(1)_mn = 4pi n c_mn + 4pi n (1-4l^2) [C (4l^2 I - g^-2N conj(C) g^-2N C)^-1]_mn,
///   F^(2)_mn = 8pi n l g^2m d_mn + 8pi n l g^2m (1-4l^2) [(...)^-1]_mn.
inline FptSet fpt_analytic(const GrunskyTables& t, const Material& mat, int ord) {
  if (ord < 1 || ord > t.order) throw ConfigError("fpt_analytic: bad order");
  const int M = t.order;
  const double lam = mat.lambda;

  FptSet f;
  f.ord = ord;
  f.F1.resize(ord, ord);
  f.F2.resize(ord, ord);

  CMat CK = CMat::Zero(M, M);   // C (...)^-1
  CMat K = CMat::Zero(M, M);    // (...)^-1
  if (lam != 0.5 && lam != -0.5) {
    const RVec gm2 = diag_gamma_minus_2n(t.gamma, M);
    const CMat lhs = 4 * lam * lam * CMat::Identity(M, M) -
                     gm2.asDiagonal() * t.C.conjugate() * gm2.asDiagonal() * t.C;
    Eigen::PartialPivLU<CMat> lu(lhs);
    K = lu.solve(CMat::Identity(M, M));
    if (!K.allFinite())
      throw NumericalError("fpt_analytic: (4 lambda^2 I - g^-2N conj(C) g^-2N C) is singular");
    CK = t.C * K;
  }

  const double w = 1 - 4 * lam * lam;
  for (int m = 1; m <= ord; ++m) {
    const double g2m = std::pow(t.gamma, 2 * m);
    for (int n = 1; n <= ord; ++n) {
      f.F1(m - 1, n - 1) = 4 * pi * n * (t.C(m - 1, n - 1) + w * CK(m - 1, n - 1));
      f.F2(m - 1, n - 1) =
          8 * pi * n * lam * g2m * ((m == n ? 1.0 : 0.0) + w * K(m - 1, n - 1));
    }
  }
  return f;
}

/// Basis change F^(1) = P N^(1) P^T, F^(2) = conj(P) N^(2) P^T on the common
/// leading block.
inline FptSet fpt_from_gpt(const GptSet& g, const FaberMatrix& fm) {
  const int ord = std::min(g.ord, fm.order);
  const CMat P = fm.P.topLeftCorner(ord, ord);
  FptSet f;
  f.ord = ord;
  f.F1 = P * g.N1.topLeftCorner(ord, ord) * P.transpose();
  f.F2 = P.conjugate() * g.N2.topLeftCorner(ord, ord) * P.transpose();
  return f;
}

/// Field perturbation u - H for H = z^m (complexified: real part corresponds
/// to H = Re z^m, imaginary part to H = Im z^m), evaluated two independent
/// ways: the single-layer potential of the solved density, and the truncated
/// multipole sum assembled from the GPTs.
struct ScatteredField {
  CVec layer;
  CVec multipole;
};

inline ScatteredField scattered_field(const BoundaryCurve& curve, const Material& mat, int m,
                                      const std::vector<Complex>& eval_points, int ord = 8) {
  if (m < 1) throw ConfigError("scattered_field: source degree must be >= 1");
  if (ord < m) throw ConfigError("scattered_field: ord must be >= source degree");
  const double rmax = curve.max_radius();
  for (const Complex& x : eval_points)
    if (std::abs(x) <= rmax)
      throw ConfigError("scattered_field: eval point inside the expansion radius");

  const NpSystem sys = assemble_np(curve);
  const detail::NpResolvent res(sys, mat.lambda);
  const int n = curve.size();
  CVec rhs(n);
  for (int j = 0; j < n; ++j)
    rhs(j) = static_cast<double>(m) * std::pow(curve.nodes(j), m - 1) * curve.normals(j);
  const CVec phi = res.solve(rhs);

  const GptSet g = gpt_nystrom(sys, mat, ord);

  ScatteredField out;
  out.layer.resize(eval_points.size());
  out.multipole.resize(eval_points.size());
  for (size_t k = 0; k < eval_points.size(); ++k) {
    const Complex x = eval_points[k];
    Complex sl{0.0, 0.0};
    for (int j = 0; j < n; ++j) sl += std::log(std::abs(x - curve.nodes(j))) * phi(j) * curve.weights(j);
    out.layer(k) = sl / (2 * pi);

    Complex mp{0.0, 0.0};
    Complex xinv = 1.0 / x, xn = 1.0;
    Complex xcinv = 1.0 / std::conj(x), xcn = 1.0;
    for (int nn = 1; nn <= ord; ++nn) {
      xn *= xinv;
      xcn *= xcinv;
      mp += (xn * g.N1(m - 1, nn - 1) + xcn * std::conj(g.N2(m - 1, nn - 1))) / static_cast<double>(nn);
    }
    out.multipole(k) = -mp / (4 * pi);
  }
  return out;
}

/// The eight monotone FPT combinations A^(variant)_mn of both sets;
/// variant in {+1,-1,+2,-2,+3,-3,+4,-4}.
inline std::pair<double, double> monotone_combination(const FptSet& f, const FptSet& g, int m,
                                                      int n, int variant) {
  if (m < 1 || n < 1 || m > f.ord || n > f.ord || m > g.ord || n > g.ord)
    throw ConfigError("monotone_combination: indices out of range");
  const int av = std::abs(variant);
  if (av < 1 || av > 4 || variant == 0)
    throw ConfigError("monotone_combination: variant must be in {+-1,..,+-4}");
  const double sgn = variant > 0 ? 1.0 : -1.0;
  auto val = [&](const FptSet& s) {
    const Complex f1mm = s.F1(m - 1, m - 1), f1nn = s.F1(n - 1, n - 1);
    const Complex f2mm = s.F2(m - 1, m - 1), f2nn = s.F2(n - 1, n - 1);
    const Complex f1mn = s.F1(m - 1, n - 1), f2mn = s.F2(m - 1, n - 1);
    switch (av) {
      case 1:
        return std::real(f1mm + f1nn + f2mm + f2nn) + sgn * 2 * std::real(f1mn + f2mn);
      case 2:
        return std::real(-f1mm - f1nn + f2mm + f2nn) - sgn * 2 * std::real(f1mn - f2mn);
      case 3:
        return std::real(f1mm - f1nn + f2mm + f2nn) - sgn * 2 * std::imag(f1mn + f2mn);
      default:
        return std::real(-f1mm + f1nn + f2mm + f2nn) + sgn * 2 * std::imag(f1mn - f2mn);
    }
  };
  return {val(f), val(g)};
}

}  // namespace gpt2d
