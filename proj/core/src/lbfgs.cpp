#include "cvvqe/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace cvvqe {

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

struct LinePoint {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;
  Eigen::VectorXd gradient;
};

class LineSearch {
 public:
  LineSearch(const ObjectiveFunction& objective, const GradientFunction& gradient, const Eigen::VectorXd& x,
             const Eigen::VectorXd& direction, const LinePoint& origin, const LbfgsOptions& options, int& evaluations)
      : objective_(objective),
        gradient_(gradient),
        x_(x),
        direction_(direction),
        origin_(origin),
        options_(options),
        evaluations_(evaluations) {}

  // Returns true and fills `accepted` on success.
  bool run(double alpha, LinePoint& accepted) {
    LinePoint previous = origin_;
    for (int step = 0; step < options_.max_line_search_steps; ++step) {
      LinePoint trial{alpha, value_at(alpha), 0.0, {}};
      if (!sufficient(trial) || (step > 0 && trial.value >= previous.value)) {
        return zoom(previous, trial, accepted);
      }
      if (!slope_at(trial)) return zoom(previous, trial, accepted);
      if (std::abs(trial.slope) <= -options_.c2 * origin_.slope) {
        accepted = std::move(trial);
        return true;
      }
      if (trial.slope >= 0.0) return zoom(trial, previous, accepted);
      previous = std::move(trial);
      alpha *= 2.0;
    }
    return false;
  }

 private:
  double value_at(double alpha) {
    ++evaluations_;
    const double value = objective_(x_ + alpha * direction_);
    return std::isnan(value) ? std::numeric_limits<double>::infinity() : value;
  }

  bool slope_at(LinePoint& point) {
    point.gradient = gradient_(x_ + point.alpha * direction_);
    if (!finite(point.gradient)) return false;
    point.slope = point.gradient.dot(direction_);
    return true;
  }

  bool sufficient(const LinePoint& point) const {
    return std::isfinite(point.value) &&
           point.value <= origin_.value + options_.c1 * point.alpha * origin_.slope;
  }

  // `low` satisfies sufficient decrease and has the lowest value seen; the
  // minimizer lies between low.alpha and high.alpha.
  bool zoom(LinePoint low, LinePoint high, LinePoint& accepted) {
    if (low.alpha > 0.0 && low.gradient.size() == 0 && !slope_at(low)) return false;
    for (int step = 0; step < options_.max_line_search_steps; ++step) {
      const double width = high.alpha - low.alpha;
      double alpha = low.alpha + 0.5 * width;
      if (std::isfinite(high.value)) {
        // quadratic through (low.value, low.slope, high.value)
        const double curvature = high.value - low.value - low.slope * width;
        if (curvature > 0.0) {
          const double candidate = low.alpha - low.slope * width * width / (2.0 * curvature);
          const double lo = std::min(low.alpha, high.alpha) + 0.1 * std::abs(width);
          const double hi = std::max(low.alpha, high.alpha) - 0.1 * std::abs(width);
          if (std::isfinite(candidate)) alpha = std::clamp(candidate, lo, hi);
        }
      }
      if (std::abs(width) <= 1e-16 * std::max(1.0, std::abs(low.alpha))) break;

      LinePoint trial{alpha, value_at(alpha), 0.0, {}};
      if (!sufficient(trial) || trial.value >= low.value) {
        high = std::move(trial);
        continue;
      }
      if (!slope_at(trial)) {
        high = std::move(trial);
        continue;
      }
      if (std::abs(trial.slope) <= -options_.c2 * origin_.slope) {
        accepted = std::move(trial);
        return true;
      }
      if (trial.slope * (high.alpha - low.alpha) >= 0.0) high = low;
      low = std::move(trial);
    }
    // Accept the best sufficient-decrease point found, if any.
    if (low.alpha > 0.0 && low.value < origin_.value) {
      if (low.gradient.size() == 0 && !slope_at(low)) return false;
      accepted = std::move(low);
      return true;
    }
    return false;
  }

  const ObjectiveFunction& objective_;
  const GradientFunction& gradient_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& direction_;
  const LinePoint& origin_;
  const LbfgsOptions& options_;
  int& evaluations_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const ObjectiveFunction& objective, const GradientFunction& gradient, Eigen::VectorXd x0,
                           const LbfgsOptions& options) {
  LbfgsResult result;
  result.x = std::move(x0);
  result.value = objective(result.x);
  result.evaluations = 1;
  Eigen::VectorXd g = gradient(result.x);
  if (!std::isfinite(result.value) || !finite(g)) {
    throw std::invalid_argument("L-BFGS start point has a non-finite objective or gradient");
  }
  result.trace.push_back(result.value);

  std::deque<Eigen::VectorXd> s_history;
  std::deque<Eigen::VectorXd> y_history;
  std::deque<double> rho_history;

  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    result.gradient_norm = g.norm();
    if (result.gradient_norm <= options.gradient_tolerance) {
      result.converged = true;
      result.stop_reason = "gradient tolerance reached";
      return result;
    }

    // two-loop recursion
    Eigen::VectorXd q = g;
    std::vector<double> alphas(s_history.size());
    for (std::size_t k = s_history.size(); k-- > 0;) {
      alphas[k] = rho_history[k] * s_history[k].dot(q);
      q -= alphas[k] * y_history[k];
    }
    if (!s_history.empty()) {
      q *= s_history.back().dot(y_history.back()) / y_history.back().squaredNorm();
    }
    for (std::size_t k = 0; k < s_history.size(); ++k) {
      const double beta = rho_history[k] * y_history[k].dot(q);
      q += (alphas[k] - beta) * s_history[k];
    }
    Eigen::VectorXd direction = -q;
    double slope = direction.dot(g);
    if (!(slope < 0.0)) {
      s_history.clear();
      y_history.clear();
      rho_history.clear();
      direction = -g;
      slope = -g.squaredNorm();
    }

    const double initial_step = s_history.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    const LinePoint origin{0.0, result.value, slope, g};
    LinePoint accepted;
    LineSearch search(objective, gradient, result.x, direction, origin, options, result.evaluations);
    if (!search.run(initial_step, accepted)) {
      if (!s_history.empty()) {
        // retry once along steepest descent with a fresh memory
        s_history.clear();
        y_history.clear();
        rho_history.clear();
        continue;
      }
      result.stop_reason = "line search failed";
      return result;
    }

    const Eigen::VectorXd step = accepted.alpha * direction;
    const Eigen::VectorXd change = accepted.gradient - g;
    const double curvature = step.dot(change);
    const double previous = result.value;
    result.x += step;
    result.value = accepted.value;
    g = accepted.gradient;
    result.iterations = iteration + 1;
    result.trace.push_back(result.value);

    if (curvature > 1e-12 * step.norm() * change.norm()) {
      s_history.push_back(step);
      y_history.push_back(change);
      rho_history.push_back(1.0 / curvature);
      if (static_cast<int>(s_history.size()) > options.memory) {
        s_history.pop_front();
        y_history.pop_front();
        rho_history.pop_front();
      }
    }

    if (previous - result.value <= options.function_tolerance * std::max(1.0, std::abs(result.value))) {
      result.gradient_norm = g.norm();
      result.converged = result.gradient_norm <= options.gradient_tolerance;
      result.stop_reason = "function decrease below tolerance";
      return result;
    }
  }
  result.gradient_norm = g.norm();
  result.converged = result.gradient_norm <= options.gradient_tolerance;
  result.stop_reason = "iteration limit";
  return result;
}

}  // namespace cvvqe
