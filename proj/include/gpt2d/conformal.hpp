#pragma once

#include <cmath>
#include <utility>

#include "gpt2d/types.hpp"

namespace gpt2d {

/// Exterior conformal map  Psi(w) = w + a0 + a1/w + a2/w^2 + ...  from
/// {|w| > gamma} onto the exterior of the domain.  gamma is the conformal
/// radius; coeffs holds a_1..a_M.
struct ConformalMap {
  double gamma = 1.0;
  Complex a0{0.0, 0.0};
  std::vector<Complex> coeffs;

  /// a_n with zero padding beyond the stored list (n >= 1).
  Complex a(int n) const {
    return (n >= 1 && n <= static_cast<int>(coeffs.size())) ? coeffs[n - 1] : Complex{0.0, 0.0};
  }

  /// Psi(w), optionally truncated to the first `truncation` coefficients.
  Complex eval(Complex w, int truncation = -1) const {
    const int m = truncation < 0 ? static_cast<int>(coeffs.size())
                                 : std::min<int>(truncation, static_cast<int>(coeffs.size()));
    Complex s = w + a0;
    Complex wn{1.0, 0.0};
    for (int n = 1; n <= m; ++n) {
      wn *= w;
      s += coeffs[n - 1] / wn;
    }
    return s;
  }

  void validate() const {
    if (!(gamma > 0.0)) throw ConfigError("ConformalMap: gamma must be positive");
  }
};

/// Coefficients of the Faber polynomials, F_m(z) = sum_n p_mn z^n.
/// P is the lower-triangular M x M matrix (p_mn)_{m,n=1..M}; the constant
/// terms p_m0 are kept separately since the basis-change relations do not
/// use them.
struct FaberMatrix {
  int order = 0;
  CMat P;
  CVec constant_terms;  // p_m0, m = 1..M
};

namespace detail {

// Rows of F_0..F_M including constant terms, from F_{m+1} = z F_m - m a_m
// - sum_{n=0}^m a_n F_{m-n}.  rows(m, k) = coefficient of z^k in F_m.
inline CMat faber_rows(Complex a0, const std::vector<Complex>& coeffs, int M) {
  auto a = [&](int n) -> Complex {
    if (n == 0) return a0;
    return (n <= static_cast<int>(coeffs.size())) ? coeffs[n - 1] : Complex{0.0, 0.0};
  };
  CMat rows = CMat::Zero(M + 1, M + 1);
  rows(0, 0) = 1.0;
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k <= m; ++k) rows(m + 1, k + 1) += rows(m, k);
    rows(m + 1, 0) -= static_cast<double>(m) * a(m);
    for (int n = 0; n <= m; ++n) rows.row(m + 1) -= a(n) * rows.row(m - n);
  }
  return rows;
}

}  // namespace detail

inline FaberMatrix faber_matrix(const ConformalMap& map, int M) {
  if (M < 1) throw ConfigError("faber_matrix: order must be >= 1");
  const CMat rows = detail::faber_rows(map.a0, map.coeffs, M);
  FaberMatrix fm;
  fm.order = M;
  fm.P = rows.block(1, 1, M, M);
  fm.constant_terms = rows.col(0).segment(1, M);
  return fm;
}

/// Grunsky coefficient tables: C = (c_mn), the expansion coefficients of
/// F_m(Psi(w)) in negative powers of w, and the symmetrized
/// G = (sqrt(n/m) c_mn / gamma^{m+n}).
struct GrunskyTables {
  int order = 0;
  CMat C;
  CMat G;
  double gamma = 1.0;

  double g_norm() const {  // largest singular value of the finite section
    return Eigen::JacobiSVD<CMat>(G).singularValues()(0);
  }
};

inline GrunskyTables grunsky_tables(const ConformalMap& map, int M) {
  if (M < 1) throw ConfigError("grunsky_tables: order must be >= 1");
  map.validate();
  auto a = [&](int n) -> Complex { return map.a(n); };

  // the recursion consumes a_{m+n}, so run rows up to index 2M
  const int rows = 2 * M + 1;
  CMat c = CMat::Zero(rows + 2, M + 2);
  for (int m = 1; m <= rows; ++m) c(m, 1) = static_cast<double>(m) * a(m);
  for (int n = 1; n < M; ++n) {
    for (int m = 1; m + n <= rows; ++m) {
      Complex s1{0.0, 0.0}, s2{0.0, 0.0};
      for (int s = 1; s < m; ++s) s1 += a(m - s) * c(s, n);
      for (int s = 1; s < n; ++s) s2 += a(n - s) * c(m, s);
      c(m, n + 1) = c(m + 1, n) - a(m + n) + s1 - s2;
    }
  }

  GrunskyTables t;
  t.order = M;
  t.gamma = map.gamma;
  t.C = c.block(1, 1, M, M);
  t.G.resize(M, M);
  for (int m = 1; m <= M; ++m)
    for (int n = 1; n <= M; ++n)
      t.G(m - 1, n - 1) =
          std::sqrt(static_cast<double>(n) / m) * t.C(m - 1, n - 1) / std::pow(map.gamma, m + n);
  return t;
}

// Diagonal scaling matrices, returned as their diagonal entries for n = 1..M.

inline RVec diag_gamma_n(double gamma, int M) {
  if (!(gamma > 0.0) || M < 1) throw ConfigError("diag_gamma_n: need gamma > 0, M >= 1");
  RVec d(M);
  for (int n = 1; n <= M; ++n) d(n - 1) = std::pow(gamma, n);
  return d;
}
inline RVec diag_gamma_minus_n(double gamma, int M) { return diag_gamma_n(1.0 / gamma, M); }
inline RVec diag_gamma_2n(double gamma, int M) { return diag_gamma_n(gamma * gamma, M); }
inline RVec diag_gamma_minus_2n(double gamma, int M) {
  return diag_gamma_n(1.0 / (gamma * gamma), M);
}
inline RVec diag_sqrt_n(int M) {
  RVec d(M);
  for (int n = 1; n <= M; ++n) d(n - 1) = std::sqrt(static_cast<double>(n));
  return d;
}
inline RVec diag_inv_sqrt_n(int M) { return diag_sqrt_n(M).cwiseInverse(); }
inline RVec diag_n(int M) {
  RVec d(M);
  for (int n = 1; n <= M; ++n) d(n - 1) = static_cast<double>(n);
  return d;
}
inline RVec diag_inv_n(int M) { return diag_n(M).cwiseInverse(); }

}  // namespace gpt2d
