#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gks {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr int kMaxDim = 8;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An algebraic axiom (orthogonality, square, positivity...) failed beyond tolerance.
class AxiomViolation : public Error {
 public:
  AxiomViolation(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double remainder)
      : Error(what + " (remainder " + std::to_string(remainder) + ")"), remainder_(remainder) {}
  double remainder() const noexcept { return remainder_; }

 private:
  double remainder_;
};

inline void require_dim(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

inline int spinor_size(int m) { return 1 << m; }

/// Relative residual helper: ||a|| / max(1, ||ref||).
template <class A, class B>
double rel_residual(const A& diff, const B& ref) {
  return diff.norm() / std::max(1.0, static_cast<double>(ref.norm()));
}

/// Max-abs entry of a dense matrix.
template <class M>
double max_abs(const M& m) {
  return m.size() == 0 ? 0.0 : static_cast<double>(m.cwiseAbs().maxCoeff());
}

struct ExpOptions {
  int max_terms = 60;
  double tolerance = 1e-13;
};

/// Matrix exponential by scaling and squaring with a Taylor core.
/// Throws ConvergenceFailure when the Taylor core does not converge within
/// `opts.max_terms` terms.
template <class Mat>
Mat expm(const Mat& x, ExpOptions opts = {}) {
  using Scalar = typename Mat::Scalar;
  const auto n = x.rows();
  double norm1 = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) norm1 = std::max(norm1, static_cast<double>(x.col(j).cwiseAbs().sum()));
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Mat scaled = x / std::pow(2.0, squarings);
  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  double last = 1.0;
  int k = 1;
  for (; k <= opts.max_terms; ++k) {
    term = (term * scaled) / static_cast<Scalar>(static_cast<double>(k));
    result += term;
    last = static_cast<double>(term.norm());
    if (last <= opts.tolerance * 1e-3 * std::max(1.0, static_cast<double>(result.norm()))) break;
  }
  if (k > opts.max_terms) throw ConvergenceFailure("matrix exponential did not converge", last);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// Exact exponential of a nilpotent matrix: sum of x^k/k! until x^k vanishes.
/// Throws ConvergenceFailure if x is not nilpotent within `max_terms`.
template <class Mat>
Mat expm_nilpotent(const Mat& x, int max_terms = 64) {
  using Scalar = typename Mat::Scalar;
  Mat result = Mat::Identity(x.rows(), x.cols());
  Mat term = result;
  for (int k = 1; k <= max_terms; ++k) {
    term = (term * x) / static_cast<Scalar>(static_cast<double>(k));
    if (term.cwiseAbs().maxCoeff() == 0.0) return result;
    result += term;
  }
  throw ConvergenceFailure("matrix is not nilpotent", static_cast<double>(term.norm()));
}

}  // namespace gks
