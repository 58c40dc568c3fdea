#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isqa/core.hpp"

namespace isqa {

// ---------------------------------------------------------------------------
// Smooth terms

class ZeroFunction final : public SmoothFunction {
 public:
  explicit ZeroFunction(std::size_t n) : n_(n) {}
  double value(const Vector&) const override { return 0.0; }
  Vector gradient(const Vector&) const override { return Vector::Zero(n_); }

 private:
  std::size_t n_;
};

/// f(x) = 1/2 x'Ax - b'x + c, A symmetric positive semidefinite.
class QuadraticFunction final : public SmoothFunction {
 public:
  QuadraticFunction(Matrix A, Vector b, double c = 0.0);
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  const Matrix& hessian() const { return A_; }

 private:
  Matrix A_;
  Vector b_;
  double c_;
};

/// f(x) = 1/2 |Ax - b|^2
class LeastSquares final : public SmoothFunction {
 public:
  LeastSquares(Matrix A, Vector b);
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  const Matrix& design() const { return A_; }

 private:
  Matrix A_;
  Vector b_;
};

/// f(x) = (1/N) sum_i log(1 + exp(-y_i <a_i, x>)), labels y_i in {-1, +1}.
class LogisticLoss final : public SmoothFunction {
 public:
  LogisticLoss(Matrix features, Vector labels);
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  /// Global Lipschitz constant of the gradient, |A|_2^2 / (4N).
  double lipschitz() const;

 private:
  Matrix A_;
  Vector y_;
};

/// f(x) = 1/4 sum_i x_i^4. The gradient is only locally Lipschitz.
class QuarticFunction final : public SmoothFunction {
 public:
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
};

// ---------------------------------------------------------------------------
// Regularizers

class ZeroRegularizer final : public Regularizer {
 public:
  double value(const Vector&) const override { return 0.0; }
  Vector prox(const Vector& v, double tau) const override;
  bool separable() const override { return true; }
  Vector prox_weighted(const Vector& v, const Vector& taus) const override;
};

/// g(x) = weight * |x|_1
class L1Norm final : public Regularizer {
 public:
  explicit L1Norm(double weight);
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double tau) const override;
  bool separable() const override { return true; }
  Vector prox_weighted(const Vector& v, const Vector& taus) const override;
  double weight() const { return weight_; }

 private:
  double weight_;
};

/// g(x) = sum_i phi(x_i) with phi(t) = |t| on |t| < 1 and t^2 otherwise.
/// Satisfies quadratic growth (phi(t) >= t^2) but not OSSC.
class QgExampleRegularizer final : public Regularizer {
 public:
  static double phi(double t);
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double tau) const override;
  bool separable() const override { return true; }
  Vector prox_weighted(const Vector& v, const Vector& taus) const override;
};

/// The two-dimensional region function
///   F(x, y) = x + sqrt(x^2 + y^2) on {x + y^2 <= 1}, +inf elsewhere.
/// Evaluation only; it has no closed-form prox.
class CounterexampleRegion final : public Regularizer {
 public:
  double value(const Vector& z) const override;
  Vector prox(const Vector& v, double tau) const override;
};

// ---------------------------------------------------------------------------
// Scalar helpers

/// Componentwise soft-thresholding sign(v_i) max(|v_i| - tau, 0).
Vector prox_l1(const Vector& v, double tau);

/// argmin_u tau*phi(u) + 1/2 (u - v)^2 for the QG-not-OSSC function phi.
double prox_qg_example(double v, double tau);

double counterexample_eval(double x, double y);

struct CounterexamplePoint {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
  double distance = 0.0;
};

/// z_i = (-(1 + 1/2 + ... + 1/(i+1)), 1) for i = 0..k with F(z_i) and the
/// distance to the optimal set {(x, 0) : x <= 0}.
std::vector<CounterexamplePoint> counterexample_trace(std::size_t k);

// ---------------------------------------------------------------------------
// Catalog

using Projector = std::function<Vector(const Vector&)>;

struct ProblemInstance {
  std::string name;
  std::uint64_t seed = 0;
  ObjectiveSplit objective;
  Vector x0;
  std::optional<double> known_F_star;
  std::optional<Projector> known_projector;
  std::optional<double> known_qg_mu;
  /// Lipschitz constant of grad f on a region containing the initial
  /// sublevel set (global when f is globally smooth).
  std::optional<double> known_local_L;
  bool level_bounded = false;
  /// The minimizer is unique, so a reference x* doubles as the projector.
  bool unique_minimizer = false;
  /// known_F_star and known_projector are exact, not planted numerically.
  bool closed_form_minimizer = false;
  /// Evaluation fixture only; the driver refuses it.
  bool fixture_only = false;
};

/// Names accepted by catalog_instantiate.
const std::vector<std::string>& catalog_names();

ProblemInstance catalog_instantiate(std::string_view name, std::size_t dimension,
                                    std::uint64_t seed);

/// max_i |(f(x+h e_i) - f(x-h e_i))/(2h) - grad_i| / (1 + |grad_i|)
double grad_check_fd(const SmoothFunction& f, const Vector& x, double h);

}  // namespace isqa
