#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>

#include "gpt2d/conformal.hpp"
#include "gpt2d/forward.hpp"
#include "gpt2d/types.hpp"

namespace gpt2d {

struct InversionOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double sigma_m = 1.0;
  double cond_cap = 1e12;        // reject N^(2) sections worse than this
  double imag_residual_cap = 1e-3;  // relative imaginary residue treated as data error
  std::ostream* warn = nullptr;
};

/// Modified GPTs at a trial contrast t:
///   N^(1/2) = N^(1) (N^(2))^-1,
///   M(t) = (I - conj(N^(1/2)) N^(1/2)) (I - 4 t^2 conj(N^(1/2)) N^(1/2))^-1,
///   tilde N^(1) = N^(1/2) M(t) N^(2),  tilde N^(2) = M(t) N^(2).
struct ModifiedGpts {
  int ord = 0;
  CMat nhalf;
  CMat tilde1;
  CMat tilde2;
  double n2_condition = 0.0;
};

/// Precomputes the t-independent pieces.  The entries of N^(2) scale like
/// gamma^{2n}, so everything is solved on the diagonally rebalanced system
/// D^-1 N D^-1 with D = diag(ghat^n); ghat is estimated from the leading
/// diagonal ratio of N^(2), which is contrast-free.
class ModifiedGptEvaluator {
 public:
  explicit ModifiedGptEvaluator(const GptSet& g, double cond_cap = 1e12) : ord_(g.ord) {
    if (ord_ < 2) throw ConfigError("modified_gpts: ord must be >= 2");

    double ghat = std::sqrt(std::abs(g.N2(1, 1)) / (2 * std::abs(g.N2(0, 0))));
    if (!std::isfinite(ghat)) ghat = 1.0;
    ghat = std::clamp(ghat, 1e-3, 1e3);
    scale_.resize(ord_);
    for (int n = 1; n <= ord_; ++n) scale_(n - 1) = std::pow(ghat, n);

    const RVec inv = scale_.cwiseInverse();
    hat2_ = inv.asDiagonal() * g.N2 * inv.asDiagonal();
    const CMat hat1 = inv.asDiagonal() * g.N1 * inv.asDiagonal();

    const Eigen::JacobiSVD<CMat> svd(hat2_);
    const double smin = svd.singularValues()(ord_ - 1);
    cond_ = smin > 0.0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
    if (!(cond_ < cond_cap))
      throw NumericalError("modified_gpts: N^(2) finite section is numerically singular (cond " +
                           std::to_string(cond_) + ")");

    // W = hat1 hat2^-1  via  hat2^T W^T = hat1^T
    Eigen::PartialPivLU<CMat> lu(hat2_.transpose());
    nhalf_hat_ = lu.solve(hat1.transpose()).transpose();
    aa_ = nhalf_hat_.conjugate() * nhalf_hat_;
  }

  int ord() const { return ord_; }
  double n2_condition() const { return cond_; }

  /// N^(1/2) in the original (unbalanced) frame.
  CMat nhalf() const {
    return scale_.asDiagonal() * nhalf_hat_ * scale_.cwiseInverse().asDiagonal();
  }

  ModifiedGpts at(double t) const {
    const CMat lhs = CMat::Identity(ord_, ord_) - 4 * t * t * aa_;
    Eigen::FullPivLU<CMat> lu(lhs.transpose());
    if (!lu.isInvertible())
      throw NumericalError("modified_gpts: (I - 4 t^2 conj(N^(1/2)) N^(1/2)) is singular at t = " +
                           std::to_string(t));
    const CMat mt = lu.solve((CMat::Identity(ord_, ord_) - aa_).transpose()).transpose();
    const CMat t2h = mt * hat2_;
    const CMat t1h = nhalf_hat_ * t2h;
    ModifiedGpts m;
    m.ord = ord_;
    m.n2_condition = cond_;
    m.nhalf = nhalf();
    m.tilde1 = scale_.asDiagonal() * t1h * scale_.asDiagonal();
    m.tilde2 = scale_.asDiagonal() * t2h * scale_.asDiagonal();
    return m;
  }

 private:
  int ord_;
  RVec scale_;
  CMat hat2_;       // rebalanced N^(2)
  CMat nhalf_hat_;  // rebalanced N^(1/2)
  CMat aa_;         // conj(N^(1/2)) N^(1/2), rebalanced frame
  double cond_ = 0.0;
};

inline ModifiedGpts modified_gpts(const GptSet& g, double t, double cond_cap = 1e12) {
  return ModifiedGptEvaluator(g, cond_cap).at(t);
}

namespace detail {

// lambda = pi (t2_11 t2_22 - t2_12 t2_21) / t2_11^3, complex before the
// roundoff imaginary residue is discarded
inline Complex lambda_functional(const CMat& t2) {
  const Complex n11 = t2(0, 0);
  if (n11 == Complex{0.0, 0.0}) throw NumericalError("lambda functional: tilde N^(2)_11 vanishes");
  return pi * (n11 * t2(1, 1) - t2(0, 1) * t2(1, 0)) / (n11 * n11 * n11);
}

}  // namespace detail

struct LambdaSolve {
  double lambda = 0.0;
  std::vector<double> trace;  // |l_{k+1} - l_k| / |l_k|
  bool damped = false;
  bool left_unit_interval = false;  // any iterate outside (-1/2, 1/2)
  double max_imag_residual = 0.0;   // |Im f| / |f| seen along the way
};

/// Step 1 of the two-step scheme: fixed-point iteration for the contrast.
/// Starts from the extreme-conductivity value computed on the raw N^(2) and
/// iterates l <- f(l); switches to averaged iteration if the plain one
/// oscillates.
inline LambdaSolve solve_lambda(const GptSet& g, double tol = 1e-10, int max_iter = 200,
                                const InversionOptions& opts = {}) {
  const ModifiedGptEvaluator eval(g, opts.cond_cap);

  LambdaSolve out;
  const Complex f0 = detail::lambda_functional(g.N2);
  out.max_imag_residual = std::abs(f0.imag()) / std::max(std::abs(f0), 1e-300);
  double lam = f0.real();

  int sign_flips = 0;
  double prev_step = 0.0;
  for (int k = 0; k < max_iter; ++k) {
    if (std::abs(lam) >= 0.5) out.left_unit_interval = true;
    const Complex fc = detail::lambda_functional(eval.at(lam).tilde2);
    out.max_imag_residual =
        std::max(out.max_imag_residual, std::abs(fc.imag()) / std::max(std::abs(fc), 1e-300));
    double next = out.damped ? 0.5 * (lam + fc.real()) : fc.real();
    const double step = next - lam;
    if (k > 0 && step * prev_step < 0.0 && ++sign_flips >= 2 && !out.damped) {
      out.damped = true;
      if (opts.warn) *opts.warn << "solve_lambda: oscillation detected, damping iteration\n";
      next = 0.5 * (lam + fc.real());
    }
    prev_step = step;
    const double rel = std::abs(next - lam) / std::max(std::abs(lam), 1e-300);
    out.trace.push_back(rel);
    lam = next;
    if (rel < tol) {
      out.lambda = lam;
      if (out.max_imag_residual > 1e-8 && opts.warn)
        *opts.warn << "solve_lambda: imaginary residue " << out.max_imag_residual
                   << " above 1e-8\n";
      return out;
    }
  }
  throw NumericalError("solve_lambda: no convergence within " + std::to_string(max_iter) +
                       " iterations (last lambda " + std::to_string(lam) + ")");
}

namespace detail {

// Shared by recover_map (tilde GPTs) and recover_extreme (raw GPTs):
//   gamma^2 = (l/2pi) n2_11,  a0 = n2_12 / (2 n2_11),
//   a_m = (l^2 / pi m) sum_{n<=m} p_mn n1_{n1}  with P rows rebuilt from the
// already recovered a_0..a_{m-1}.
inline ConformalMap recover_coefficients(const CVec& n1_col, Complex n2_11, Complex n2_12,
                                         double lambda, int ord, const InversionOptions& opts) {
  if (n2_11 == Complex{0.0, 0.0}) throw NumericalError("recover: tilde N^(2)_11 vanishes");
  const Complex g2 = lambda / (2 * pi) * n2_11;
  const double g2_imag_rel = std::abs(g2.imag()) / std::max(std::abs(g2), 1e-300);
  if (g2.real() <= 0.0)
    throw NumericalError("recover: gamma^2 has nonpositive real part (wrong lambda or bad data)");
  if (g2_imag_rel > opts.imag_residual_cap)
    throw NumericalError("recover: gamma^2 has a large imaginary part (wrong lambda or bad data)");
  if (g2_imag_rel > 1e-8 && opts.warn)
    *opts.warn << "recover: gamma^2 imaginary residue " << g2_imag_rel << " above 1e-8\n";

  ConformalMap map;
  map.gamma = std::sqrt(g2.real());
  map.a0 = n2_12 / (2.0 * n2_11);
  map.coeffs.reserve(ord);
  for (int m = 1; m <= ord; ++m) {
    const CMat rows = faber_rows(map.a0, map.coeffs, m);
    Complex am{0.0, 0.0};
    for (int n = 1; n <= m; ++n) am += rows(m, n) * n1_col(n - 1);
    am *= lambda * lambda / (pi * m);
    map.coeffs.push_back(am);
  }
  return map;
}

}  // namespace detail

/// Step 2: explicit conformal-map coefficients from the modified GPTs at the
/// recovered contrast.
inline ConformalMap recover_map(const GptSet& g, double lambda, const InversionOptions& opts = {}) {
  if (g.ord < 2) throw ConfigError("recover_map: ord must be >= 2");
  if (std::abs(lambda) < 0.5)
    throw ConfigError("recover_map: |lambda| must be >= 1/2");
  const ModifiedGpts m = modified_gpts(g, lambda, opts.cond_cap);
  return detail::recover_coefficients(m.tilde1.col(0), m.tilde2(0, 0), m.tilde2(0, 1), lambda,
                                      g.ord, opts);
}

/// Extreme-conductivity recovery (lambda = +-1/2): the modification factor is
/// the identity, so the raw GPTs enter directly and no N^(2) inversion is
/// needed.
inline ConformalMap recover_extreme(const GptSet& g, double lambda,
                                    const InversionOptions& opts = {}) {
  if (lambda != 0.5 && lambda != -0.5)
    throw ConfigError("recover_extreme: lambda must be +1/2 or -1/2");
  if (g.ord < 2) throw ConfigError("recover_extreme: ord must be >= 2");
  return detail::recover_coefficients(g.N1.col(0), g.N2(0, 0), g.N2(0, 1), lambda, g.ord, opts);
}

struct ReconstructionResult {
  double lambda_rec = 0.0;
  double sigma_rec = 0.0;
  ConformalMap map_rec;
  int iterations = 0;
  std::vector<double> residual_trace;
  bool converged = false;
  bool damped = false;
  bool n2_ill_conditioned = false;
  bool suspect_lambda = false;       // |lambda| <= 1/2 at the fixed point
  bool left_unit_interval = false;
  double n2_condition = 0.0;
  double lambda_imag_residual = 0.0;
};

/// The full two-step scheme: solve_lambda, then recover_map, then convert
/// the contrast back to a conductivity via sigma_c = sigma_m (2l+1)/(2l-1).
inline ReconstructionResult reconstruct(const GptSet& g, const InversionOptions& opts = {}) {
  const LambdaSolve ls = solve_lambda(g, opts.tol, opts.max_iter, opts);

  ReconstructionResult r;
  r.lambda_rec = ls.lambda;
  r.iterations = static_cast<int>(ls.trace.size());
  r.residual_trace = ls.trace;
  r.converged = true;
  r.damped = ls.damped;
  r.left_unit_interval = ls.left_unit_interval;
  r.lambda_imag_residual = ls.max_imag_residual;
  r.suspect_lambda = std::abs(ls.lambda) <= 0.5;
  if (r.suspect_lambda && opts.warn)
    *opts.warn << "reconstruct: fixed point " << ls.lambda
               << " has |lambda| <= 1/2, suspect data\n";

  r.map_rec = recover_map(g, ls.lambda, opts);
  r.n2_condition = ModifiedGptEvaluator(g, opts.cond_cap).n2_condition();
  r.n2_ill_conditioned = r.n2_condition > 1e10;

  const double den = 2 * ls.lambda - 1;
  r.sigma_rec = den == 0.0 ? std::numeric_limits<double>::infinity()
                           : opts.sigma_m * (2 * ls.lambda + 1) / den;
  return r;
}

}  // namespace gpt2d
