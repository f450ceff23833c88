#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

double sse(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
           const Eigen::VectorXd& w, double b) {
  double total = 0.0;
  for (long i = 0; i < X.rows(); ++i) {
    double pred = b;
    for (long j = 0; j < X.cols(); ++j) pred += X(i, j) * w(j);
    const double r = y(i) - pred;
    total += r * r;
  }
  return total;
}

double svr_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& w, double b, double c, double eps) {
  double obj = 0.0;
  for (long j = 0; j < X.cols(); ++j) obj += 0.5 * w(j) * w(j);
  for (long i = 0; i < X.rows(); ++i) {
    double pred = b;
    for (long j = 0; j < X.cols(); ++j) pred += X(i, j) * w(j);
    const double excess = std::abs(y(i) - pred) - eps;
    if (excess > 0.0) obj += c * excess;
  }
  return obj;
}

std::uint64_t MiniRng::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545f4914f6cdd1dull;
}

double MiniRng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

SearchResult ols_random_search(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               int n_candidates, double lo, double hi,
                               std::uint64_t seed) {
  MiniRng rng(seed);
  const long d = X.cols();
  SearchResult best;
  best.w = Eigen::VectorXd::Zero(d);
  best.b = 0.0;
  best.objective = sse(X, y, best.w, best.b);
  Eigen::VectorXd w(d);
  for (int k = 0; k < n_candidates; ++k) {
    for (long j = 0; j < d; ++j) w(j) = rng.uniform(lo, hi);
    const double b = rng.uniform(lo, hi);
    const double obj = sse(X, y, w, b);
    if (obj < best.objective) {
      best.w = w;
      best.b = b;
      best.objective = obj;
    }
  }
  return best;
}

namespace {

double svr_objective_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        double w, double b, double c, double eps) {
  double obj = 0.5 * w * w;
  for (long i = 0; i < x.size(); ++i) {
    const double excess = std::abs(y(i) - w * x(i) - b) - eps;
    if (excess > 0.0) obj += c * excess;
  }
  return obj;
}

GridResult scan(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double c,
                double eps, double w_lo, double w_hi, double b_lo, double b_hi,
                double step) {
  GridResult best;
  best.w = w_lo;
  best.b = b_lo;
  best.objective = svr_objective_1d(x, y, w_lo, b_lo, c, eps);
  const long nw = static_cast<long>(std::floor((w_hi - w_lo) / step + 0.5)) + 1;
  const long nb = static_cast<long>(std::floor((b_hi - b_lo) / step + 0.5)) + 1;
  for (long i = 0; i < nw; ++i) {
    const double w = w_lo + static_cast<double>(i) * step;
    for (long j = 0; j < nb; ++j) {
      const double b = b_lo + static_cast<double>(j) * step;
      const double obj = svr_objective_1d(x, y, w, b, c, eps);
      ++best.evaluations;
      if (obj < best.objective) {
        best.w = w;
        best.b = b;
        best.objective = obj;
      }
    }
  }
  return best;
}

}  // namespace

GridResult svr_grid_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       double c, double eps, double w_lo, double w_hi,
                       double b_lo, double b_hi, double coarse_step,
                       double fine_step, double window) {
  const GridResult coarse =
      scan(x, y, c, eps, w_lo, w_hi, b_lo, b_hi, coarse_step);
  GridResult fine = scan(x, y, c, eps,
                         std::max(w_lo, coarse.w - window),
                         std::min(w_hi, coarse.w + window),
                         std::max(b_lo, coarse.b - window),
                         std::min(b_hi, coarse.b + window), fine_step);
  fine.evaluations += coarse.evaluations;
  if (coarse.objective < fine.objective) {
    fine.w = coarse.w;
    fine.b = coarse.b;
    fine.objective = coarse.objective;
  }
  return fine;
}

}  // namespace oracle
