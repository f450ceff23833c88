#include "enorm/regress.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

namespace enorm {

namespace {

// Minimizer of f(b) = sum_i max(0, |z_i - b| - eps): the slope is -n below
// all 2n breakpoints z_i -+ eps and gains one per crossing, so the flat
// optimal stretch is [B[n-1], B[n]]. The midpoint makes the choice unique.
double optimal_intercept(const Eigen::VectorXd& z, double eps) {
  const long n = z.size();
  std::vector<double> breaks;
  breaks.reserve(static_cast<std::size_t>(2 * n));
  for (long i = 0; i < n; ++i) {
    breaks.push_back(z(i) - eps);
    breaks.push_back(z(i) + eps);
  }
  std::sort(breaks.begin(), breaks.end());
  return 0.5 * (breaks[static_cast<std::size_t>(n - 1)] +
                breaks[static_cast<std::size_t>(n)]);
}

// One exact pairwise dual step: beta_i += t, beta_j -= t keeps the equality
// constraint, and the move cost
//   phi(t) = a t^2 + g t + eps (|beta_i + t| + |beta_j - t|)
// is convex piecewise quadratic with kinks where either coordinate crosses
// zero. Minimize by evaluating the per-region stationary points, the kinks
// and the box ends.
double best_pair_step(double a, double g, double eps, double bi, double bj,
                      double lo, double hi, double* gain) {
  const auto phi = [&](double t) {
    return a * t * t + g * t + eps * (std::abs(bi + t) + std::abs(bj - t));
  };
  std::vector<double> knots = {lo, hi};
  if (-bi > lo && -bi < hi) knots.push_back(-bi);
  if (bj > lo && bj < hi) knots.push_back(bj);
  std::sort(knots.begin(), knots.end());

  double t_best = 0.0;
  double p_best = phi(0.0);
  const auto consider = [&](double t) {
    const double p = phi(t);
    if (p < p_best) {
      p_best = p;
      t_best = t;
    }
  };
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    consider(knots[k]);
    if (a > 0.0) {
      const double m = 0.5 * (knots[k] + knots[k + 1]);
      const double s1 = bi + m >= 0.0 ? 1.0 : -1.0;
      const double s2 = bj - m >= 0.0 ? 1.0 : -1.0;
      const double t = -(g + eps * (s1 - s2)) / (2.0 * a);
      if (t > knots[k] && t < knots[k + 1]) consider(t);
    }
  }
  consider(knots.back());
  *gain = phi(0.0) - p_best;
  return t_best;
}

}  // namespace

void validate(const RegressionSpec& spec) {
  if (spec.kind == RegKind::svr) {
    if (!(spec.svr_c > 0.0)) throw ValidationError("svr_c must be > 0");
    if (!(spec.svr_epsilon >= 0.0)) throw ValidationError("svr_epsilon must be >= 0");
    if (!(spec.svr_tol > 0.0)) throw ValidationError("svr_tol must be > 0");
    if (spec.svr_max_iter < 1) throw ValidationError("svr_max_iter must be >= 1");
  }
}

int poly2_dim(int d) { return d + d * (d + 1) / 2; }

int expanded_dim(Expansion expansion, int input_dim) {
  return expansion == Expansion::poly2 ? poly2_dim(input_dim) : input_dim;
}

std::vector<std::string> expansion_terms(Expansion expansion, int input_dim) {
  std::vector<std::string> terms;
  for (int i = 0; i < input_dim; ++i) terms.push_back("x" + std::to_string(i + 1));
  if (expansion == Expansion::poly2) {
    for (int i = 0; i < input_dim; ++i) {
      for (int j = i; j < input_dim; ++j) {
        terms.push_back("x" + std::to_string(i + 1) + "*x" +
                        std::to_string(j + 1));
      }
    }
  }
  return terms;
}

Eigen::MatrixXd expand_poly2(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  const long n = X.rows();
  const int d = static_cast<int>(X.cols());
  Eigen::MatrixXd out(n, poly2_dim(d));
  out.leftCols(d) = X;
  int col = d;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      out.col(col++) = X.col(i).cwiseProduct(X.col(j));
    }
  }
  return out;
}

FittedModel fit_ols(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y) {
  const long n = X.rows();
  const long d = X.cols();
  if (y.size() != n) throw ValidationError("fit_ols: X and y row counts differ");
  if (n < d + 1) {
    throw ValidationError("fit_ols: need at least " + std::to_string(d + 1) +
                          " rows for " + std::to_string(d) + " features");
  }
  Eigen::MatrixXd A(n, d + 1);
  A.col(0).setOnes();
  A.rightCols(d) = X;
  // Equilibrate columns to unit norm so the rank test measures degeneracy,
  // not the wildly different magnitudes of energy vs flops columns; the
  // solution is rescaled back afterwards.
  Eigen::VectorXd scale(d + 1);
  for (long j = 0; j <= d; ++j) {
    const double norm = A.col(j).norm();
    scale(j) = norm > 0.0 ? norm : 1.0;
    A.col(j) /= scale(j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  qr.setThreshold(1e-10);
  qr.compute(A);
  if (qr.rank() < d + 1) {
    throw ValidationError("fit_ols: design matrix is rank deficient");
  }
  const Eigen::VectorXd beta =
      qr.solve(y).cwiseQuotient(scale);

  FittedModel model;
  model.kind = RegKind::linear;
  model.expansion = Expansion::identity;
  model.input_dim = static_cast<int>(d);
  model.weights = beta.tail(d);
  model.intercept = beta(0);
  model.solver.converged = true;
  model.solver.stop_reason = "closed_form";
  model.solver.iterations = 0;
  model.solver.objective =
      (y - X * model.weights - Eigen::VectorXd::Constant(n, model.intercept))
          .squaredNorm();
  return model;
}

double svr_objective(const Eigen::Ref<const Eigen::VectorXd>& w, double b,
                     const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXd>& y, double c,
                     double epsilon) {
  const Eigen::VectorXd r = y - X * w - Eigen::VectorXd::Constant(y.size(), b);
  double loss = 0.0;
  for (long i = 0; i < r.size(); ++i) {
    loss += std::max(0.0, std::abs(r(i)) - epsilon);
  }
  return 0.5 * w.squaredNorm() + c * loss;
}

FittedModel fit_svr_linear(const Eigen::Ref<const Eigen::MatrixXd>& Xref,
                           const Eigen::Ref<const Eigen::VectorXd>& yref,
                           const RegressionSpec& spec) {
  validate(spec);
  const Eigen::MatrixXd X = Xref;
  const Eigen::VectorXd y = yref;
  const long n = X.rows();
  const long d = X.cols();
  if (y.size() != n) throw ValidationError("fit_svr_linear: X and y row counts differ");
  if (n < 1) throw ValidationError("fit_svr_linear: empty data");

  const double c = spec.svr_c;
  const double eps = spec.svr_epsilon;

  // Dual of the primal above: minimize 0.5 beta^T X X^T beta + eps ||beta||_1
  // - y^T beta over sum(beta) = 0, |beta_i| <= C, with w = X^T beta. Exact
  // coordinate minimization along every pair direction e_i - e_j; since the
  // nonsmooth term is separable, a point optimal along all pair directions is
  // a global dual optimum, and coordinate steps cannot stall at kinks the way
  // they do in the primal. The intercept never enters the dual: it is
  // recovered afterwards by the exact breakpoint scan.
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = optimal_intercept(y, eps);

  SolverInfo info;
  double best = svr_objective(w, b, X, y, c, eps);
  Eigen::VectorXd best_w = w;
  double best_b = b;
  info.objective_trace.push_back(best);

  for (int sweep = 0; sweep < spec.svr_max_iter; ++sweep) {
    w = X.transpose() * beta;  // refresh against incremental drift
    double improvement = 0.0;
    for (long i = 0; i + 1 < n; ++i) {
      for (long j = i + 1; j < n; ++j) {
        const double bi = beta(i);
        const double bj = beta(j);
        const double lo = std::max(-c - bi, bj - c);
        const double hi = std::min(c - bi, bj + c);
        if (!(hi > lo)) continue;
        const double ui = X.row(i) * w;
        const double uj = X.row(j) * w;
        const double g = (ui - y(i)) - (uj - y(j));
        const double a = 0.5 * (X.row(i) - X.row(j)).squaredNorm();
        double gain = 0.0;
        const double t = best_pair_step(a, g, eps, bi, bj, lo, hi, &gain);
        if (gain > 0.0) {
          beta(i) += t;
          beta(j) -= t;
          w += t * (X.row(i) - X.row(j)).transpose();
          improvement += gain;
        }
      }
    }
    info.iterations = sweep + 1;

    b = optimal_intercept(y - X * w, eps);
    const double primal = svr_objective(w, b, X, y, c, eps);
    if (primal < best) {
      best = primal;
      best_w = w;
      best_b = b;
    }
    info.objective_trace.push_back(best);

    if (improvement <= spec.svr_tol * std::max(1.0, std::abs(best))) {
      info.converged = true;
      info.stop_reason = "tol";
      break;
    }
    if (sweep + 1 == spec.svr_max_iter) {
      info.converged = false;
      info.stop_reason = "max_iter";
    }
  }
  info.objective = best;

  FittedModel model;
  model.kind = RegKind::svr;
  model.expansion = Expansion::identity;
  model.input_dim = static_cast<int>(d);
  model.weights = best_w;
  model.intercept = best_b;
  model.solver = info;
  return model;
}

FittedModel fit(const Eigen::Ref<const Eigen::MatrixXd>& X,
                const Eigen::Ref<const Eigen::VectorXd>& y,
                const RegressionSpec& spec) {
  validate(spec);

  Eigen::MatrixXd Xw = X;
  std::optional<Scaler> scaler;
  if (spec.standardize) {
    Scaler sc;
    sc.mean = X.colwise().mean();
    sc.stddev.resize(X.cols());
    for (long j = 0; j < X.cols(); ++j) {
      const double var = (X.col(j).array() - sc.mean(j)).square().sum() /
                         static_cast<double>(X.rows());
      const double sd = std::sqrt(var);
      sc.stddev(j) = sd > 0.0 ? sd : 1.0;
    }
    Xw = (Xw.rowwise() - sc.mean.transpose()).array().rowwise() /
         sc.stddev.transpose().array();
    scaler = sc;
  }
  const Expansion expansion =
      spec.kind == RegKind::poly2 ? Expansion::poly2 : Expansion::identity;
  if (expansion == Expansion::poly2) Xw = expand_poly2(Xw);

  FittedModel model = spec.kind == RegKind::svr ? fit_svr_linear(Xw, y, spec)
                                                : fit_ols(Xw, y);
  model.kind = spec.kind;
  model.expansion = expansion;
  model.input_dim = static_cast<int>(X.cols());
  model.scaler = scaler;
  return model;
}

Eigen::VectorXd predict(const FittedModel& model,
                        const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (static_cast<int>(X.cols()) != model.input_dim) {
    throw ValidationError("predict: expected " + std::to_string(model.input_dim) +
                          " feature columns, got " + std::to_string(X.cols()));
  }
  Eigen::MatrixXd Xw = X;
  if (model.scaler) {
    Xw = (Xw.rowwise() - model.scaler->mean.transpose()).array().rowwise() /
         model.scaler->stddev.transpose().array();
  }
  if (model.expansion == Expansion::poly2) Xw = expand_poly2(Xw);
  if (Xw.cols() != model.weights.size()) {
    throw ValidationError("predict: model weight size mismatch");
  }
  return Xw * model.weights + Eigen::VectorXd::Constant(Xw.rows(), model.intercept);
}

}  // namespace enorm
