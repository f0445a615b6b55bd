#include "cvvqe/models.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace cvvqe {

std::string to_string(Boundary boundary) { return boundary == Boundary::open ? "open" : "periodic"; }

Boundary boundary_from_string(const std::string& name) {
  if (name == "open") return Boundary::open;
  if (name == "periodic") return Boundary::periodic;
  throw std::invalid_argument(fmt::format("unknown boundary '{}' (expected open|periodic)", name));
}

void BoseHubbardParams::validate() const {
  if (n_sites < 2) throw std::invalid_argument(fmt::format("Bose-Hubbard chain needs L >= 2, got {}", n_sites));
  if (boundary == Boundary::periodic && n_sites < 3) {
    throw std::invalid_argument("periodic Bose-Hubbard chain needs L >= 3");
  }
}

std::vector<std::pair<int, int>> BoseHubbardParams::bonds() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i + 1 < n_sites; ++i) out.emplace_back(i, i + 1);
  if (boundary == Boundary::periodic) out.emplace_back(n_sites - 1, 0);
  return out;
}

LadderPolynomial bose_hubbard_polynomial(const BoseHubbardParams& params) {
  params.validate();
  std::vector<LadderMonomial> terms;
  const double t = params.hopping;
  for (const auto& [i, j] : params.bonds()) {
    terms.push_back({-t, {LadderOp::annihilate(i), LadderOp::create(j)}});
    terms.push_back({-t, {LadderOp::create(i), LadderOp::annihilate(j)}});
  }
  const double half_u = 0.5 * params.interaction;
  for (int i = 0; i < params.n_sites; ++i) {
    terms.push_back({half_u, {LadderOp::create(i), LadderOp::annihilate(i), LadderOp::create(i), LadderOp::annihilate(i)}});
    terms.push_back({-(params.chemical_potential + half_u), {LadderOp::create(i), LadderOp::annihilate(i)}});
  }
  LadderPolynomial poly(std::move(terms));
  poly.canonicalize();
  return poly;
}

LadderPolynomial total_number(int n_modes) {
  LadderPolynomial poly;
  for (int i = 0; i < n_modes; ++i) poly += LadderPolynomial::number(i);
  return poly;
}

}  // namespace cvvqe
