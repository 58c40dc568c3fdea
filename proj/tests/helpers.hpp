#pragma once

#include <memory>

#include "isqa/core.hpp"
#include "isqa/problems.hpp"

namespace testing_util {

inline isqa::Vector vec(std::initializer_list<double> xs) {
  isqa::Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

/// f(x) = 1/2 s |x|^2 in n dimensions.
inline std::shared_ptr<isqa::QuadraticFunction> half_sq(std::size_t n, double s = 1.0) {
  const auto N = static_cast<Eigen::Index>(n);
  return std::make_shared<isqa::QuadraticFunction>(s * isqa::Matrix::Identity(N, N),
                                                    isqa::Vector::Zero(N));
}

/// Linear f(x) = <c, x>, via a zero-Hessian quadratic.
inline std::shared_ptr<isqa::QuadraticFunction> linear(const isqa::Vector& c) {
  const auto N = c.size();
  return std::make_shared<isqa::QuadraticFunction>(isqa::Matrix::Zero(N, N), -c);
}

inline isqa::ObjectiveSplit split(std::shared_ptr<const isqa::SmoothFunction> f,
                                  std::shared_ptr<const isqa::Regularizer> g, std::size_t n) {
  return {std::move(f), std::move(g), n};
}

inline std::shared_ptr<isqa::L1Norm> l1(double w = 1.0) { return std::make_shared<isqa::L1Norm>(w); }
inline std::shared_ptr<isqa::ZeroRegularizer> zero_g() {
  return std::make_shared<isqa::ZeroRegularizer>();
}

}  // namespace testing_util
