#ifndef NEVP_TYPES_HPP
#define NEVP_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nevp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user input (bad matrices, malformed problem data, bad config values).
struct InputError : Error {
  explicit InputError(const std::string& msg) : Error(msg) {}
};

/// A lambda landed (numerically) on the spectrum of the operator being solved.
struct OnSpectrumError : Error {
  explicit OnSpectrumError(const std::string& msg) : Error(msg) {}
};

/// The asymptotic matrices fail the hyperbolicity requirement near a lambda.
struct EssentialSpectrumError : Error {
  explicit EssentialSpectrumError(const std::string& msg) : Error(msg) {}
};

/// Numerical failure: non-convergence, ill conditioning, inconclusive result.
struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

inline constexpr double kDefaultHyperbolicityTol = 1e-8;

}  // namespace nevp

#endif
