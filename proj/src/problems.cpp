#include "isqa/problems.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <utility>

namespace isqa {

namespace {

void require_positive_tau(double tau, const char* who) {
  if (!(tau > 0.0)) throw UsageError(fmt::format("{}: tau must be positive (got {})", who, tau));
}

void require_same_size(const Vector& a, const Vector& b, const char* who) {
  if (a.size() != b.size()) throw UsageError(fmt::format("{}: dimension mismatch", who));
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double max_eigenvalue(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double min_eigenvalue(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix A(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = normal(rng);
  }
  return A;
}

Vector gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto& c : v) c = normal(rng);
  return v;
}

Projector constant_projector(Vector target) {
  return [target = std::move(target)](const Vector&) { return target; };
}

}  // namespace

// ---------------------------------------------------------------------------
// Smooth terms

QuadraticFunction::QuadraticFunction(Matrix A, Vector b, double c)
    : A_(std::move(A)), b_(std::move(b)), c_(c) {
  if (A_.rows() != A_.cols() || A_.rows() != b_.size()) {
    throw UsageError("QuadraticFunction: A must be square and match b");
  }
}

double QuadraticFunction::value(const Vector& x) const {
  return 0.5 * x.dot(A_ * x) - b_.dot(x) + c_;
}

Vector QuadraticFunction::gradient(const Vector& x) const { return A_ * x - b_; }

LeastSquares::LeastSquares(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size()) throw UsageError("LeastSquares: rows of A must match b");
}

double LeastSquares::value(const Vector& x) const { return 0.5 * (A_ * x - b_).squaredNorm(); }

Vector LeastSquares::gradient(const Vector& x) const { return A_.transpose() * (A_ * x - b_); }

LogisticLoss::LogisticLoss(Matrix features, Vector labels)
    : A_(std::move(features)), y_(std::move(labels)) {
  if (A_.rows() != y_.size() || A_.rows() == 0) {
    throw UsageError("LogisticLoss: one label per sample required");
  }
}

double LogisticLoss::value(const Vector& x) const {
  const Vector margins = y_.cwiseProduct(A_ * x);
  double total = 0.0;
  for (const double t : margins) {
    // log(1 + exp(-t)) without overflow
    total += t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
  }
  return total / static_cast<double>(A_.rows());
}

Vector LogisticLoss::gradient(const Vector& x) const {
  const Vector margins = y_.cwiseProduct(A_ * x);
  Vector weights(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double t = margins[i];
    // sigma(-t) = 1 / (1 + exp(t))
    const double s = t > 0.0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t));
    weights[i] = -y_[i] * s;
  }
  return A_.transpose() * weights / static_cast<double>(A_.rows());
}

double LogisticLoss::lipschitz() const {
  return max_eigenvalue(A_.transpose() * A_) / (4.0 * static_cast<double>(A_.rows()));
}

double QuarticFunction::value(const Vector& x) const { return 0.25 * x.array().pow(4).sum(); }

Vector QuarticFunction::gradient(const Vector& x) const { return x.array().cube().matrix(); }

// ---------------------------------------------------------------------------
// Regularizers

Vector ZeroRegularizer::prox(const Vector& v, double tau) const {
  require_positive_tau(tau, "ZeroRegularizer::prox");
  return v;
}

Vector ZeroRegularizer::prox_weighted(const Vector& v, const Vector& taus) const {
  require_same_size(v, taus, "ZeroRegularizer::prox_weighted");
  return v;
}

L1Norm::L1Norm(double weight) : weight_(weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw UsageError("L1Norm: weight must be finite and nonnegative");
  }
}

double L1Norm::value(const Vector& x) const { return weight_ * x.lpNorm<1>(); }

Vector L1Norm::prox(const Vector& v, double tau) const {
  require_positive_tau(tau, "L1Norm::prox");
  return prox_l1(v, weight_ * tau);
}

Vector L1Norm::prox_weighted(const Vector& v, const Vector& taus) const {
  require_same_size(v, taus, "L1Norm::prox_weighted");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    require_positive_tau(taus[i], "L1Norm::prox_weighted");
    out[i] = soft_threshold(v[i], weight_ * taus[i]);
  }
  return out;
}

double QgExampleRegularizer::phi(double t) {
  const double a = std::abs(t);
  return a < 1.0 ? a : t * t;
}

double QgExampleRegularizer::value(const Vector& x) const {
  double total = 0.0;
  for (const double t : x) total += phi(t);
  return total;
}

Vector QgExampleRegularizer::prox(const Vector& v, double tau) const {
  require_positive_tau(tau, "QgExampleRegularizer::prox");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = prox_qg_example(v[i], tau);
  return out;
}

Vector QgExampleRegularizer::prox_weighted(const Vector& v, const Vector& taus) const {
  require_same_size(v, taus, "QgExampleRegularizer::prox_weighted");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = prox_qg_example(v[i], taus[i]);
  return out;
}

double CounterexampleRegion::value(const Vector& z) const {
  if (z.size() != 2) throw UsageError("CounterexampleRegion: point must be two-dimensional");
  return counterexample_eval(z[0], z[1]);
}

Vector CounterexampleRegion::prox(const Vector&, double) const {
  throw UsageError("counterexample-region is an evaluation fixture and has no prox");
}

// ---------------------------------------------------------------------------
// Scalar helpers

Vector prox_l1(const Vector& v, double tau) {
  require_positive_tau(tau, "prox_l1");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], tau);
  return out;
}

double prox_qg_example(double v, double tau) {
  require_positive_tau(tau, "prox_qg_example");
  auto objective = [&](double u) {
    const double r = u - v;
    return tau * QgExampleRegularizer::phi(u) + 0.5 * r * r;
  };
  // Minimizer of each piece restricted to that piece, plus both breakpoints.
  std::array<double, 5> candidates{};
  std::size_t count = 0;
  const double linear = soft_threshold(v, tau);
  if (std::abs(linear) < 1.0) candidates[count++] = linear;
  const double quadratic = v / (1.0 + 2.0 * tau);
  if (std::abs(quadratic) >= 1.0) candidates[count++] = quadratic;
  candidates[count++] = 1.0;
  candidates[count++] = -1.0;

  double best = candidates[0];
  double best_value = objective(best);
  for (std::size_t i = 1; i < count; ++i) {
    const double value = objective(candidates[i]);
    if (value < best_value) {
      best = candidates[i];
      best_value = value;
    }
  }
  return best;
}

double counterexample_eval(double x, double y) {
  if (x + y * y > 1.0) return kInf;
  const double r = std::hypot(x, y);
  // x + r = y^2 / (r - x) for x < 0, which avoids cancellation.
  if (x < 0.0) return y * y / (r - x);
  return x + r;
}

std::vector<CounterexamplePoint> counterexample_trace(std::size_t k) {
  std::vector<CounterexamplePoint> trace;
  trace.reserve(k + 1);
  double harmonic = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    harmonic += 1.0 / static_cast<double>(i + 1);
    CounterexamplePoint p;
    p.x = -harmonic;
    p.y = 1.0;
    p.value = counterexample_eval(p.x, p.y);
    // Optimal set {(x, 0) : x <= 0}; p.x < 0 so the projection is (p.x, 0).
    p.distance = p.x <= 0.0 ? std::abs(p.y) : std::hypot(p.x, p.y);
    trace.push_back(p);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Catalog

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"sc-quadratic-l1", "logistic-l1",
                                              "quartic",         "qg-not-ossc",
                                              "counterexample-region", "fbs-reference"};
  return names;
}

namespace {

ProblemInstance make_sc_quadratic_l1(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto dim = static_cast<Eigen::Index>(n);
  const Matrix B = gaussian_matrix(rng, dim, dim);
  const Matrix A = B.transpose() * B / static_cast<double>(n) + 0.5 * Matrix::Identity(dim, dim);
  const double weight = 0.1;

  // Plant a sparse minimizer x* and choose b so that 0 is in A x* - b + weight * sign(x*).
  std::bernoulli_distribution active(0.5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> inner(-0.5, 0.5);
  Vector x_star(dim);
  Vector subgrad(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (active(rng)) {
      double v = normal(rng);
      if (v == 0.0) v = 1.0;
      x_star[i] = v;
      subgrad[i] = v > 0.0 ? 1.0 : -1.0;
    } else {
      x_star[i] = 0.0;
      subgrad[i] = inner(rng);
    }
  }
  const Vector b = A * x_star + weight * subgrad;
  Vector x0 = 2.0 * gaussian_vector(rng, dim);

  auto smooth = std::make_shared<QuadraticFunction>(A, b);
  auto reg = std::make_shared<L1Norm>(weight);

  ProblemInstance inst;
  inst.name = "sc-quadratic-l1";
  inst.seed = seed;
  inst.objective = {smooth, reg, n};
  inst.x0 = std::move(x0);
  inst.known_F_star = smooth->value(x_star) + reg->value(x_star);
  inst.known_projector = constant_projector(x_star);
  inst.known_qg_mu = min_eigenvalue(A);
  inst.known_local_L = max_eigenvalue(A);
  inst.level_bounded = true;
  inst.unique_minimizer = true;
  return inst;
}

ProblemInstance make_logistic_l1(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto dim = static_cast<Eigen::Index>(n);
  const Eigen::Index samples = 4 * dim;
  const Matrix A = gaussian_matrix(rng, samples, dim);
  const Vector w = gaussian_vector(rng, dim) / std::sqrt(static_cast<double>(n));
  std::normal_distribution<double> noise;
  Vector labels(samples);
  for (Eigen::Index i = 0; i < samples; ++i) {
    labels[i] = A.row(i).dot(w) + noise(rng) >= 0.0 ? 1.0 : -1.0;
  }
  auto smooth = std::make_shared<LogisticLoss>(A, labels);

  ProblemInstance inst;
  inst.name = "logistic-l1";
  inst.seed = seed;
  inst.objective = {smooth, std::make_shared<L1Norm>(0.05), n};
  inst.x0 = Vector::Zero(dim);
  inst.known_local_L = smooth->lipschitz();
  inst.level_bounded = true;
  inst.unique_minimizer = true;
  return inst;
}

ProblemInstance make_quartic(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ProblemInstance inst;
  inst.name = "quartic";
  inst.seed = seed;
  inst.objective = {std::make_shared<QuarticFunction>(), std::make_shared<ZeroRegularizer>(), n};
  inst.x0 = gaussian_vector(rng, static_cast<Eigen::Index>(n));
  inst.known_F_star = 0.0;
  inst.known_projector = constant_projector(Vector::Zero(static_cast<Eigen::Index>(n)));
  // On {sum x_i^4 <= sum x0_i^4} every |x_i|^2 is at most sqrt(sum x0_i^4),
  // and the Hessian is diag(3 x_i^2).
  inst.known_local_L = 3.0 * std::sqrt(inst.x0.array().pow(4).sum());
  inst.level_bounded = true;
  inst.unique_minimizer = true;
  inst.closed_form_minimizer = true;
  return inst;
}

ProblemInstance make_qg_not_ossc(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> magnitude(1.5, 4.0);
  std::bernoulli_distribution negative(0.5);
  Vector x0(static_cast<Eigen::Index>(n));
  for (auto& c : x0) c = negative(rng) ? -magnitude(rng) : magnitude(rng);

  ProblemInstance inst;
  inst.name = "qg-not-ossc";
  inst.seed = seed;
  inst.objective = {std::make_shared<ZeroFunction>(n), std::make_shared<QgExampleRegularizer>(), n};
  inst.x0 = std::move(x0);
  inst.known_F_star = 0.0;
  inst.known_projector = constant_projector(Vector::Zero(static_cast<Eigen::Index>(n)));
  inst.known_qg_mu = 2.0;
  inst.level_bounded = true;
  inst.unique_minimizer = true;
  inst.closed_form_minimizer = true;
  return inst;
}

ProblemInstance make_counterexample_region(std::size_t n, std::uint64_t seed) {
  if (n != 2) throw UsageError("counterexample-region is two-dimensional");
  ProblemInstance inst;
  inst.name = "counterexample-region";
  inst.seed = seed;
  inst.objective = {std::make_shared<ZeroFunction>(2), std::make_shared<CounterexampleRegion>(), 2};
  inst.x0 = Vector{{-1.0, 1.0}};
  inst.known_F_star = 0.0;
  inst.known_projector = [](const Vector& z) { return Vector{{std::min(z[0], 0.0), 0.0}}; };
  inst.fixture_only = true;
  return inst;
}

ProblemInstance make_fbs_reference(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto dim = static_cast<Eigen::Index>(n);
  const Eigen::Index rows = 2 * dim;
  const Matrix A = gaussian_matrix(rng, rows, dim) / std::sqrt(static_cast<double>(rows));
  const Vector b = gaussian_vector(rng, rows);

  ProblemInstance inst;
  inst.name = "fbs-reference";
  inst.seed = seed;
  inst.objective = {std::make_shared<LeastSquares>(A, b), std::make_shared<L1Norm>(0.1), n};
  inst.x0 = Vector::Zero(dim);
  inst.known_local_L = max_eigenvalue(A.transpose() * A);
  inst.level_bounded = true;
  inst.unique_minimizer = true;
  return inst;
}

}  // namespace

ProblemInstance catalog_instantiate(std::string_view name, std::size_t dimension,
                                    std::uint64_t seed) {
  if (dimension == 0) throw UsageError("catalog_instantiate: dimension must be positive");
  if (name == "sc-quadratic-l1") return make_sc_quadratic_l1(dimension, seed);
  if (name == "logistic-l1") return make_logistic_l1(dimension, seed);
  if (name == "quartic") return make_quartic(dimension, seed);
  if (name == "qg-not-ossc") return make_qg_not_ossc(dimension, seed);
  if (name == "counterexample-region") return make_counterexample_region(dimension, seed);
  if (name == "fbs-reference") return make_fbs_reference(dimension, seed);
  throw UsageError(fmt::format("unknown problem '{}'", name));
}

double grad_check_fd(const SmoothFunction& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw UsageError("grad_check_fd: h must be positive");
  if (!f.in_domain(x)) throw UsageError("grad_check_fd: x outside the domain of f");

  auto probes_ok = [&](double step) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vector p = x;
      p[i] += step;
      if (!f.in_domain(p)) return false;
      p[i] = x[i] - step;
      if (!f.in_domain(p)) return false;
    }
    return true;
  };
  if (!probes_ok(h)) {
    h /= 10.0;
    if (!probes_ok(h)) throw UsageError("grad_check_fd: probe points leave the domain of f");
  }

  const Vector grad = f.gradient(x);
  double worst = 0.0;
  Vector p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double up = f.value(p);
    p[i] = x[i] - h;
    const double down = f.value(p);
    p[i] = x[i];
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - grad[i]) / (1.0 + std::abs(grad[i])));
  }
  return worst;
}

}  // namespace isqa
