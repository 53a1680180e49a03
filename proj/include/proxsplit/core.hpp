#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace proxsplit {

using Vec = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// prox_{γh}(y) for an arbitrary positive scale γ.
using ScaledProx = std::function<Vec(double gamma, const Vec& y)>;
/// A proximity (or projection) map at a fixed, already-baked-in scale.
using ProxMap = std::function<Vec(const Vec& y)>;
using GradientMap = std::function<Vec(const Vec& x)>;
using Objective = std::function<double(const Vec& x)>;

/// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters or shapes, detected before any work is done.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A function was asked for a value or gradient outside where it is defined.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::ptrdiff_t index = -1)
      : Error(what), index_(index) {}
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

/// An iterative method produced NaN or infinity.
class NonFiniteIterate : public Error {
 public:
  NonFiniteIterate(const std::string& where, std::size_t iteration)
      : Error(where + ": non-finite iterate at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

/// A linear map together with its adjoint.
struct LinearOperatorPair {
  ProxMap forward;
  ProxMap adjoint;
  Eigen::Index dim_in = 0;   ///< domain dimension of `forward`
  Eigen::Index dim_out = 0;  ///< codomain dimension of `forward`
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace proxsplit
