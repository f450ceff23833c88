#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "enorm/errors.hpp"

namespace enorm {

enum class RegKind { linear, poly2, svr };

struct RegressionSpec {
  RegKind kind = RegKind::linear;
  double svr_c = 0.1;
  double svr_epsilon = 1e-4;
  double svr_tol = 1e-10;
  int svr_max_iter = 100000;
  bool standardize = false;

  bool operator==(const RegressionSpec&) const = default;
};
void validate(const RegressionSpec& spec);

// Per-column z-score parameters captured from training data.
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
};

enum class Expansion { identity, poly2 };

struct SolverInfo {
  int iterations = 0;
  double objective = 0.0;
  bool converged = true;
  std::string stop_reason;  // "closed_form" | "tol" | "max_iter"
  std::vector<double> objective_trace;  // one entry per pass, non-increasing
};

// Fitted affine map in expanded-feature space. Immutable; predict is
// deterministic and total on finite inputs.
struct FittedModel {
  RegKind kind = RegKind::linear;
  Expansion expansion = Expansion::identity;
  int input_dim = 0;             // raw d before scaling/expansion
  Eigen::VectorXd weights;       // length matches expansion of input_dim
  double intercept = 0.0;
  std::optional<Scaler> scaler;
  SolverInfo solver;
};

// Monomial names for the expanded feature space, e.g. {"x1","x2","x1*x2",...}.
std::vector<std::string> expansion_terms(Expansion expansion, int input_dim);
int expanded_dim(Expansion expansion, int input_dim);
int poly2_dim(int d);

// All degree <= 2 monomials of the columns of X, constant excluded.
// Column order: x1..xd, then xi*xj for i <= j in lexicographic (i, j) order.
Eigen::MatrixXd expand_poly2(const Eigen::Ref<const Eigen::MatrixXd>& X);

// Least squares via column-pivoted Householder QR of [1 | X]. Rank deficiency
// is flagged when a diagonal of R falls below 1e-10 of the largest one.
FittedModel fit_ols(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y);

// Primal epsilon-insensitive linear SVR:
//   J(w, b) = 0.5*||w||^2 + C * sum_i max(0, |y_i - w.x_i - b| - eps)
// solved through its dual (box-constrained, one equality constraint) by exact
// pairwise coordinate minimization; w comes back from the dual variables and
// b takes the midpoint of its optimal interval. The objective trace records
// the best primal value after each dual sweep. Non-convergence is reported in
// SolverInfo, never thrown.
FittedModel fit_svr_linear(const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const Eigen::VectorXd>& y,
                           const RegressionSpec& spec);

double svr_objective(const Eigen::Ref<const Eigen::VectorXd>& w, double b,
                     const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXd>& y, double c,
                     double epsilon);

// Dispatch on spec.kind, applying standardization and expansion as configured.
FittedModel fit(const Eigen::Ref<const Eigen::MatrixXd>& X,
                const Eigen::Ref<const Eigen::VectorXd>& y,
                const RegressionSpec& spec);

// Scaler (if any), then expansion, then the affine map.
Eigen::VectorXd predict(const FittedModel& model,
                        const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace enorm
