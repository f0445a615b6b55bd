#pragma once

// Limited-memory BFGS with a strong-Wolfe line search (bracketing + zoom).
// The objective may return +inf at infeasible points; the line search treats
// those as failed sufficient-decrease tests and shrinks the step.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvvqe {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 500;
  double gradient_tolerance = 1e-7;
  /// Stop (without claiming convergence) once an accepted step improves the
  /// objective by less than this fraction of max(1, |f|).
  double function_tolerance = 1e-15;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search_steps = 40;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string stop_reason;
  /// Objective after each accepted iteration, starting with the initial point.
  std::vector<double> trace;
};

using ObjectiveFunction = std::function<double(const Eigen::VectorXd&)>;
using GradientFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Throws std::invalid_argument if the objective or gradient is not finite at x0.
LbfgsResult minimize_lbfgs(const ObjectiveFunction& objective, const GradientFunction& gradient, Eigen::VectorXd x0,
                           const LbfgsOptions& options = {});

}  // namespace cvvqe
