#include <gtest/gtest.h>

#include "cvvqe/models.hpp"
#include "cvvqe/wick.hpp"

using namespace cvvqe;

TEST(Models, BondsFollowBoundary) {
  BoseHubbardParams p;
  p.n_sites = 4;
  EXPECT_EQ(p.bonds().size(), 3u);
  p.boundary = Boundary::periodic;
  EXPECT_EQ(p.bonds().size(), 4u);
  EXPECT_EQ(p.bonds().back(), (std::pair<int, int>{3, 0}));
}

TEST(Models, ValidateRejectsBadChains) {
  BoseHubbardParams p;
  p.n_sites = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.n_sites = 2;
  p.boundary = Boundary::periodic;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(boundary_from_string("twisted"), std::invalid_argument);
  EXPECT_EQ(boundary_from_string(to_string(Boundary::periodic)), Boundary::periodic);
}

TEST(Models, PolynomialTerms) {
  const BoseHubbardParams p;
  const auto h = bose_hubbard_polynomial(p);
  // two hopping terms, and per site an interaction and a number term
  EXPECT_EQ(h.size(), 6u);
  EXPECT_EQ(h.mode_span(), 2);
  EXPECT_EQ(h.max_length(), 4u);

  BoseHubbardParams no_hop;
  no_hop.hopping = 0.0;
  EXPECT_EQ(bose_hubbard_polynomial(no_hop).size(), 4u);
}

TEST(Models, VacuumEnergyIsZero) {
  const BoseHubbardParams p;
  EXPECT_EQ(polynomial_expectation(bose_hubbard_polynomial(p), vacuum_covariance(2)), Complex(0.0));
}

TEST(Models, TotalNumber) {
  const auto n = total_number(3);
  EXPECT_EQ(n.size(), 3u);
  EXPECT_EQ(n.mode_span(), 3);
}
