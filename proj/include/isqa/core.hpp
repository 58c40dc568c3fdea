#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>

#include "isqa/errors.hpp"

namespace isqa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_finite(const Vector& v);

/// Smooth convex term f with a gradient oracle.
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual bool in_domain(const Vector& /*x*/) const { return true; }
};

/// Proper lsc convex term g. value() returns +inf off dom g.
class Regularizer {
 public:
  virtual ~Regularizer() = default;

  virtual double value(const Vector& x) const = 0;

  /// argmin_u tau*g(u) + 1/2 |u - v|^2
  virtual Vector prox(const Vector& v, double tau) const = 0;

  /// True when g(x) = sum_i g_i(x_i); enables prox_weighted.
  virtual bool separable() const { return false; }

  /// Coordinatewise prox with a separate step per coordinate.
  virtual Vector prox_weighted(const Vector& v, const Vector& taus) const;

  bool in_domain(const Vector& x) const;
};

/// F = f + g over R^n.
struct ObjectiveSplit {
  std::shared_ptr<const SmoothFunction> smooth;
  std::shared_ptr<const Regularizer> regularizer;
  std::size_t dimension = 0;
};

/// F(x) = f(x) + g(x), +inf off dom g.
double eval_F(const ObjectiveSplit& obj, const Vector& x);

/// Symmetric positive operator H with declared spectral bounds m, M.
class Metric {
 public:
  static Metric scaled_identity(double scale, std::size_t n);
  /// Bounds taken as the exact min/max entry.
  static Metric diagonal(Vector entries);
  static Metric diagonal(Vector entries, double m, double M);
  static Metric dense(Matrix H, double m, double M);
  /// Dense operator whose spectrum is known to lie in [lo, hi] within [m, M].
  static Metric dense(Matrix H, double m, double M, double lo, double hi);

  Vector apply(const Vector& v) const;
  double m() const { return m_; }
  double M() const { return M_; }
  /// Spectral bounds of this particular operator, inside [m, M]. Inner
  /// solvers step and certify with these; m_k/M_k >= m/M, so every rate
  /// stated with the declared bounds still holds.
  double spectral_min() const { return lo_; }
  double spectral_max() const { return hi_; }
  std::size_t dimension() const { return n_; }

  /// Scaled identity or diagonal.
  bool is_diagonal() const { return kind_ != Kind::dense; }
  /// Diagonal entries; only valid when is_diagonal().
  Vector diagonal_entries() const;
  Matrix to_dense() const;

 private:
  enum class Kind { scaled_identity, diagonal, dense };

  Metric(Kind kind, std::size_t n, double m, double M);

  Kind kind_;
  std::size_t n_;
  double m_;
  double M_;
  double lo_;
  double hi_;
  double scale_ = 1.0;
  Vector diag_;
  Matrix dense_;
};

/// <v, H v>
double metric_norm_sq(const Metric& metric, const Vector& v);

struct MetricBoundReport {
  double min_quotient = kInf;
  double max_quotient = -kInf;
  std::size_t probes = 0;
};

/// Probes Rayleigh quotients on random unit vectors (plus the coordinate
/// axes for diagonal metrics, which makes the diagonal check exact). Throws
/// MetricBoundError when a quotient leaves the spectral range, widened by 1e-9.
MetricBoundReport validate_metric_bounds(const Metric& metric,
                                         std::size_t trials,
                                         std::uint64_t seed);

/// Frozen quadratic model of F around the anchor x_k:
///   Q_k(x) = <grad f(x_k), x - x_k> + g(x) - g(x_k) + 1/2 |x - x_k|_k^2
class SubproblemModel {
 public:
  SubproblemModel(ObjectiveSplit obj, Metric metric, Vector anchor);

  const ObjectiveSplit& objective() const { return obj_; }
  const Metric& metric() const { return metric_; }
  const Vector& anchor() const { return anchor_; }
  const Vector& grad_at_anchor() const { return grad_; }
  double f_at_anchor() const { return f_; }
  double g_at_anchor() const { return g_; }
  double F_at_anchor() const { return f_ + g_; }
  std::size_t dimension() const { return anchor_.size(); }

  double Q(const Vector& x) const;
  double Delta(const Vector& x) const;
  /// Gradient of the smooth part of Q_k: grad f(x_k) + H (y - x_k).
  Vector smooth_gradient(const Vector& y) const;

 private:
  void check_dimension(const Vector& x) const;

  ObjectiveSplit obj_;
  Metric metric_;
  Vector anchor_;
  Vector grad_;
  double f_;
  double g_;
};

SubproblemModel make_subproblem(const ObjectiveSplit& obj, const Metric& metric,
                                const Vector& x_k);
double eval_Q(const SubproblemModel& model, const Vector& x);
double eval_Delta(const SubproblemModel& model, const Vector& x);

}  // namespace isqa
