#include <doctest.h>

#include <random>

#include "gpt2d/gpt2d.hpp"
#include "oracle_helpers.hpp"

using namespace gpt2d;

namespace {

ConformalMap sample_map(unsigned seed, int n_coeffs, double scale = 0.3) {
  std::mt19937_64 rng(seed);
  return random_map(rng, n_coeffs, scale);
}

}  // namespace

TEST_CASE("Faber rows reproduce the printed F2 and F3 coefficients") {
  ConformalMap m;
  m.gamma = 1.2;
  m.a0 = Complex{0.3, -0.2};
  m.coeffs = {Complex{0.1, 0.05}, Complex{-0.04, 0.02}, Complex{0.01, 0.0}};
  const Complex a0 = m.a0, a1 = m.coeffs[0], a2 = m.coeffs[1];
  const FaberMatrix fm = faber_matrix(m, 4);

  // F2 = z^2 - 2 a0 z + a0^2 - 2 a1
  CHECK(std::abs(fm.P(1, 1) - 1.0) < 1e-15);
  CHECK(std::abs(fm.P(1, 0) - (-2.0 * a0)) < 1e-15);
  CHECK(std::abs(fm.constant_terms(1) - (a0 * a0 - 2.0 * a1)) < 1e-15);

  // F3 = z^3 - 3 a0 z^2 + 3 (a0^2 - a1) z - a0^3 + 3 a0 a1 - 3 a2
  CHECK(std::abs(fm.P(2, 2) - 1.0) < 1e-15);
  CHECK(std::abs(fm.P(2, 1) - (-3.0 * a0)) < 1e-15);
  CHECK(std::abs(fm.P(2, 0) - 3.0 * (a0 * a0 - a1)) < 1e-14);
  CHECK(std::abs(fm.constant_terms(2) - (-a0 * a0 * a0 + 3.0 * a0 * a1 - 3.0 * a2)) < 1e-14);
}

TEST_CASE("Faber matrix structural invariants") {
  const ConformalMap m = sample_map(3, 6);
  const int M = 9;
  const FaberMatrix fm = faber_matrix(m, M);
  for (int r = 0; r < M; ++r) {
    CHECK(std::abs(fm.P(r, r) - 1.0) < 1e-13);
    for (int c = r + 1; c < M; ++c) CHECK(std::abs(fm.P(r, c)) == 0.0);
    if (r + 1 < M) CHECK(std::abs(fm.P(r + 1, r) - (-(r + 2.0) * m.a0)) < 1e-13);
  }

  ConformalMap disk;
  disk.gamma = 1.7;
  const FaberMatrix id = faber_matrix(disk, 5);
  CHECK((id.P - CMat::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(faber_matrix(disk, 0), ConfigError);
}

TEST_CASE("Grunsky first row and column follow the recursion seed") {
  const ConformalMap m = sample_map(5, 8);
  const GrunskyTables t = grunsky_tables(m, 8);
  for (int k = 1; k <= 8; ++k) {
    CHECK(std::abs(t.C(0, k - 1) - m.a(k)) < 1e-14);
    CHECK(std::abs(t.C(k - 1, 0) - static_cast<double>(k) * m.a(k)) < 1e-14);
  }

  ConformalMap disk;
  disk.gamma = 0.8;
  const GrunskyTables td = grunsky_tables(disk, 6);
  CHECK(td.C.cwiseAbs().maxCoeff() == 0.0);
  CHECK(td.G.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Joukowski Grunsky coefficients are diagonal powers of a1") {
  ConformalMap jk;
  jk.gamma = 1.0;
  jk.coeffs = {Complex{0.35, 0.1}};
  const GrunskyTables t = grunsky_tables(jk, 5);
  for (int m = 1; m <= 5; ++m) {
    for (int n = 1; n <= 5; ++n) {
      const Complex expect = oracle::grunsky_symbolic(jk, m, n);
      CHECK(std::abs(t.C(m - 1, n - 1) - expect) < 1e-13);
      const Complex diag = m == n ? std::pow(jk.coeffs[0], m) : Complex{0.0, 0.0};
      CHECK(std::abs(t.C(m - 1, n - 1) - diag) < 1e-13);
    }
  }
}

TEST_CASE("Grunsky symmetry n c_mn = m c_nm for univalent-like maps") {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const ConformalMap m = sample_map(seed, 10, 1.0);  // |a_n| <= gamma^{n+1}/(n+1)
    const GrunskyTables t = grunsky_tables(m, 10);
    const double scale = std::max(t.C.cwiseAbs().maxCoeff(), 1e-30);
    for (int i = 1; i <= 10; ++i)
      for (int j = 1; j <= 10; ++j) {
        const Complex lhs = static_cast<double>(j) * t.C(i - 1, j - 1);
        const Complex rhs = static_cast<double>(i) * t.C(j - 1, i - 1);
        CHECK(std::abs(lhs - rhs) < 1e-12 * scale * std::max(i, j));
      }
    CHECK((t.G - t.G.transpose()).cwiseAbs().maxCoeff() <
          1e-12 * std::max(1.0, t.G.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("G relates to C through the diagonal scalings") {
  const ConformalMap m = sample_map(9, 7);
  const int M = 7;
  const GrunskyTables t = grunsky_tables(m, M);
  const RVec left = diag_inv_sqrt_n(M).cwiseProduct(diag_gamma_minus_n(m.gamma, M));
  const RVec right = diag_gamma_minus_n(m.gamma, M).cwiseProduct(diag_sqrt_n(M));
  const CMat rebuilt = left.asDiagonal() * t.C * right.asDiagonal();
  CHECK((rebuilt - t.G).cwiseAbs().maxCoeff() < 1e-13 * std::max(1.0, t.G.cwiseAbs().maxCoeff()));
}

TEST_CASE("scaling diagonals") {
  CHECK((diag_gamma_n(1.0, 4) - RVec::Ones(4)).cwiseAbs().maxCoeff() == 0.0);
  const RVec g = diag_gamma_n(2.0, 3);
  CHECK(g(0) == 2.0);
  CHECK(g(1) == 4.0);
  CHECK(g(2) == 8.0);
  CHECK(diag_gamma_minus_2n(2.0, 2)(1) == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(diag_sqrt_n(4)(3) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(diag_inv_n(5)(4) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(diag_gamma_n(-1.0, 3), ConfigError);
}

TEST_CASE("G is invariant under the shrink rescaling of the domain") {
  const ConformalMap m = sample_map(13, 8);
  const GrunskyTables t0 = grunsky_tables(m, 8);
  const double delta = 0.2;
  ConformalMap shrunk = m;
  shrunk.gamma = (1 - delta) * m.gamma;
  for (size_t n = 1; n <= shrunk.coeffs.size(); ++n)
    shrunk.coeffs[n - 1] *= std::pow(1 - delta, n + 1);
  const GrunskyTables t1 = grunsky_tables(shrunk, 8);
  CHECK((t0.G - t1.G).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, t0.G.cwiseAbs().maxCoeff()));
}

TEST_CASE("faber_matrix and grunsky_tables are mutually consistent") {
  // expand F_m(Psi(w)) on |w| = 2 gamma by direct summation and read off the
  // negative powers; the map is normalized to gamma = 1 (c_mn rescale
  // exactly) so the R^{m+n} roundoff amplification stays below the tolerance
  ConformalMap m = sample_map(17, 8);
  for (size_t n = 1; n <= m.coeffs.size(); ++n) m.coeffs[n - 1] /= std::pow(m.gamma, n + 1);
  m.gamma = 1.0;
  const GrunskyTables t = grunsky_tables(m, 8);
  for (int mm = 1; mm <= 8; ++mm)
    for (int nn = 1; nn <= 8; ++nn) {
      const Complex expect = oracle::grunsky_quadrature(m, mm, nn, 2 * m.gamma);
      CHECK(std::abs(t.C(mm - 1, nn - 1) - expect) <
            1e-10 * std::max(1.0, std::abs(expect)));
    }
}

TEST_CASE("operator norm of G stays below 1 for decaying coefficients") {
  for (unsigned seed = 30; seed < 40; ++seed) {
    const ConformalMap m = sample_map(seed, 10);
    CHECK(grunsky_tables(m, 12).g_norm() < 1.0);
  }
}
