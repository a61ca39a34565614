#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gpt2d {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Invalid parameters, malformed specs, bad files.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Singular systems, non-convergence, out-of-range recovered values.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// deterministic uniforms; std::uniform_real_distribution is
// implementation-defined and would break byte-identical outputs
inline double uniform01(std::uint64_t r) { return static_cast<double>(r >> 11) * 0x1.0p-53; }

}  // namespace detail

}  // namespace gpt2d
