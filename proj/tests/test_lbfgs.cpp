#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "cvvqe/lbfgs.hpp"

using namespace cvvqe;

TEST(Lbfgs, Quadratic) {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(3, 1.0, 3.0);
  const auto f = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x) - b.dot(x); };
  const auto g = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x - b; };
  const auto result = minimize_lbfgs(f, g, Eigen::VectorXd::Zero(3));
  EXPECT_TRUE(result.converged);
  EXPECT_LT((result.x - a.ldlt().solve(b)).norm(), 1e-7);
}

TEST(Lbfgs, Rosenbrock) {
  const auto f = [](const Eigen::VectorXd& x) {
    return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
  };
  const auto g = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd out(2);
    out(0) = -400.0 * x(0) * (x(1) - x(0) * x(0)) - 2.0 * (1.0 - x(0));
    out(1) = 200.0 * (x(1) - x(0) * x(0));
    return out;
  };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto result = minimize_lbfgs(f, g, x0);
  EXPECT_TRUE(result.converged) << result.stop_reason;
  EXPECT_NEAR(result.x(0), 1.0, 1e-6);
  EXPECT_NEAR(result.x(1), 1.0, 1e-6);
  for (std::size_t k = 1; k < result.trace.size(); ++k) EXPECT_LE(result.trace[k], result.trace[k - 1]);
}

TEST(Lbfgs, InfeasibleRegionIsAvoided) {
  // minimum of (x-2)^2 at x = 2, but the objective is +inf for x > 1.5
  const auto f = [](const Eigen::VectorXd& x) {
    return x(0) > 1.5 ? std::numeric_limits<double>::infinity() : (x(0) - 2.0) * (x(0) - 2.0);
  };
  const auto g = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, 2.0 * (x(0) - 2.0));
  };
  const auto result = minimize_lbfgs(f, g, Eigen::VectorXd::Zero(1));
  EXPECT_TRUE(std::isfinite(result.value));
  EXPECT_LE(result.x(0), 1.5);
  EXPECT_GT(result.x(0), 1.0);
  EXPECT_FALSE(result.converged);
}

TEST(Lbfgs, RejectsInfeasibleStart) {
  const auto f = [](const Eigen::VectorXd&) { return std::numeric_limits<double>::infinity(); };
  const auto g = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(x.size()); };
  EXPECT_THROW(minimize_lbfgs(f, g, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}
