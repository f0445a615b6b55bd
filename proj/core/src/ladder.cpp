#include "cvvqe/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace cvvqe {

LadderPolynomial::LadderPolynomial(LadderMonomial monomial) { terms_.push_back(std::move(monomial)); }

LadderPolynomial::LadderPolynomial(std::vector<LadderMonomial> terms) : terms_(std::move(terms)) {}

LadderPolynomial LadderPolynomial::identity() { return constant(1.0); }

LadderPolynomial LadderPolynomial::constant(Complex value) { return LadderPolynomial(LadderMonomial{value, {}}); }

LadderPolynomial LadderPolynomial::op(LadderOp op, Complex coefficient) {
  return LadderPolynomial(LadderMonomial{coefficient, {op}});
}

LadderPolynomial LadderPolynomial::number(int mode) {
  return LadderPolynomial(LadderMonomial{1.0, {LadderOp::create(mode), LadderOp::annihilate(mode)}});
}

LadderPolynomial LadderPolynomial::subtractions(int mode, int count) {
  if (count < 0) throw std::invalid_argument("subtraction count must be non-negative");
  return LadderPolynomial(
      LadderMonomial{1.0, std::vector<LadderOp>(static_cast<std::size_t>(count), LadderOp::annihilate(mode))});
}

LadderPolynomial LadderPolynomial::product(std::span<const LadderOp> ops, Complex coefficient) {
  return LadderPolynomial(LadderMonomial{coefficient, {ops.begin(), ops.end()}});
}

std::size_t LadderPolynomial::max_length() const {
  std::size_t longest = 0;
  for (const auto& term : terms_) longest = std::max(longest, term.length());
  return longest;
}

int LadderPolynomial::mode_span() const {
  int span = 0;
  for (const auto& term : terms_) {
    for (const auto& op : term.ops) span = std::max(span, op.mode + 1);
  }
  return span;
}

LadderPolynomial& LadderPolynomial::canonicalize() {
  std::map<std::vector<LadderOp>, std::size_t> slot;
  std::vector<LadderMonomial> merged;
  merged.reserve(terms_.size());
  for (auto& term : terms_) {
    auto [it, inserted] = slot.try_emplace(term.ops, merged.size());
    if (inserted) {
      merged.push_back(std::move(term));
    } else {
      merged[it->second].coefficient += term.coefficient;
    }
  }
  double largest = 0.0;
  for (const auto& term : merged) largest = std::max(largest, std::abs(term.coefficient));
  const double threshold = 1e-15 * largest;
  std::erase_if(merged, [threshold](const LadderMonomial& term) {
    return term.coefficient == Complex(0.0) || std::abs(term.coefficient) < threshold;
  });
  terms_ = std::move(merged);
  return *this;
}

LadderPolynomial LadderPolynomial::canonical() const {
  LadderPolynomial copy = *this;
  copy.canonicalize();
  return copy;
}

LadderPolynomial& LadderPolynomial::operator+=(const LadderPolynomial& rhs) {
  terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  return *this;
}

LadderPolynomial& LadderPolynomial::operator*=(Complex scale) {
  for (auto& term : terms_) term.coefficient *= scale;
  return *this;
}

LadderPolynomial operator*(const LadderPolynomial& lhs, const LadderPolynomial& rhs) {
  std::vector<LadderMonomial> terms;
  terms.reserve(lhs.size() * rhs.size());
  for (const auto& left : lhs.terms()) {
    for (const auto& right : rhs.terms()) {
      LadderMonomial term{left.coefficient * right.coefficient, left.ops};
      term.ops.insert(term.ops.end(), right.ops.begin(), right.ops.end());
      terms.push_back(std::move(term));
    }
  }
  return LadderPolynomial(std::move(terms));
}

bool LadderPolynomial::approx_equal(const LadderPolynomial& other, double tolerance) const {
  const auto a = canonical();
  const auto b = other.canonical();
  std::map<std::vector<LadderOp>, Complex> difference;
  for (const auto& term : a.terms()) difference[term.ops] += term.coefficient;
  for (const auto& term : b.terms()) difference[term.ops] -= term.coefficient;
  return std::all_of(difference.begin(), difference.end(),
                     [tolerance](const auto& entry) { return std::abs(entry.second) <= tolerance; });
}

LadderPolynomial dagger(const LadderPolynomial& poly) {
  std::vector<LadderMonomial> terms;
  terms.reserve(poly.size());
  for (const auto& term : poly.terms()) {
    LadderMonomial flipped{std::conj(term.coefficient), {}};
    flipped.ops.reserve(term.ops.size());
    for (auto it = term.ops.rbegin(); it != term.ops.rend(); ++it) flipped.ops.push_back(it->dagger());
    terms.push_back(std::move(flipped));
  }
  return LadderPolynomial(std::move(terms));
}

LadderPolynomial multiply(const LadderPolynomial& lhs, const LadderPolynomial& rhs) { return lhs * rhs; }

// ---------------------------------------------------------------------------

LadderPolynomial conjugate_by_gaussian(const LadderPolynomial& poly, const BogoliubovMap& map) {
  const int n = map.n_modes();
  if (poly.mode_span() > n) {
    throw std::invalid_argument(
        fmt::format("polynomial touches mode {} but the Bogoliubov map has {} modes", poly.mode_span(), n));
  }

  // images[kind][k] = nonzero (coefficient, op) terms replacing that operator
  using Image = std::vector<std::pair<Complex, LadderOp>>;
  std::vector<Image> creation_images(static_cast<std::size_t>(n));
  std::vector<Image> annihilation_images(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const Complex e = map.E(k, j);
      const Complex f = map.F(k, j);
      if (e != Complex(0.0)) {
        creation_images[static_cast<std::size_t>(k)].emplace_back(e, LadderOp::create(j));
        annihilation_images[static_cast<std::size_t>(k)].emplace_back(std::conj(e), LadderOp::annihilate(j));
      }
      if (f != Complex(0.0)) {
        creation_images[static_cast<std::size_t>(k)].emplace_back(f, LadderOp::annihilate(j));
        annihilation_images[static_cast<std::size_t>(k)].emplace_back(std::conj(f), LadderOp::create(j));
      }
    }
  }

  std::vector<LadderMonomial> out;
  for (const auto& term : poly.terms()) {
    std::vector<LadderMonomial> partial{LadderMonomial{term.coefficient, {}}};
    for (const auto& op : term.ops) {
      const auto& image = op.is_creation() ? creation_images[static_cast<std::size_t>(op.mode)]
                                           : annihilation_images[static_cast<std::size_t>(op.mode)];
      std::vector<LadderMonomial> next;
      next.reserve(partial.size() * image.size());
      for (const auto& prefix : partial) {
        for (const auto& [coefficient, replacement] : image) {
          LadderMonomial extended{prefix.coefficient * coefficient, prefix.ops};
          extended.ops.push_back(replacement);
          next.push_back(std::move(extended));
        }
      }
      partial = std::move(next);
    }
    out.insert(out.end(), std::make_move_iterator(partial.begin()), std::make_move_iterator(partial.end()));
  }
  LadderPolynomial result(std::move(out));
  result.canonicalize();
  return result;
}

ReducedCircuit ipag_reduce(std::span<const IpagLayer> layers, const IpagOptions& options) {
  if (layers.empty()) throw std::invalid_argument("ipag_reduce needs at least one layer");
  const int n = layers.front().gaussian.n_modes();

  double bound = 1.0;
  std::size_t op_count = 0;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& layer = layers[k];
    if (layer.gaussian.n_modes() != n || layer.ladder.mode_span() > n) {
      throw std::invalid_argument(fmt::format("IPAG layer {} does not act on {} modes", k + 1, n));
    }
    op_count += layer.ladder.max_length();
    bound *= static_cast<double>(std::max<std::size_t>(layer.ladder.size(), 1));
    if (k + 1 < layers.size()) bound *= std::pow(2.0 * n, static_cast<double>(layer.ladder.max_length()));
  }

  LadderPolynomial ladder = layers.front().ladder.canonical();
  SymplecticMatrix global = layers.front().gaussian;
  for (std::size_t k = 1; k < layers.size(); ++k) {
    const auto& layer = layers[k];
    const auto forward = bogoliubov_of(layer.gaussian).inverse();
    ladder = layer.ladder * conjugate_by_gaussian(ladder, forward);
    ladder.canonicalize();
    global = layer.gaussian * global;
  }

  if (static_cast<double>(ladder.size()) > bound) {
    throw std::logic_error(fmt::format("IPAG reduction produced {} terms, above the bound {}", ladder.size(), bound));
  }
  ReducedCircuit reduced{global, std::move(ladder), op_count, false};
  if (reduced.ladder.size() > options.term_warning_cap) {
    reduced.exceeded_term_cap = true;
    std::clog << fmt::format("warning: reduced IPAG polynomial has {} terms (cap {})\n", reduced.ladder.size(),
                             options.term_warning_cap);
  }
  return reduced;
}

// ---------------------------------------------------------------------------

namespace {

std::string format_coefficient(Complex c) {
  if (c.imag() == 0.0) return fmt::format("{:.17g}", c.real());
  return fmt::format("({:.17g},{:.17g})", c.real(), c.imag());
}

}  // namespace

void write_polynomial(std::ostream& out, const LadderPolynomial& poly) {
  for (const auto& term : poly.terms()) {
    out << format_coefficient(term.coefficient) << " *";
    if (term.ops.empty()) out << " 1";
    for (const auto& op : term.ops) out << (op.is_creation() ? " a'(" : " a(") << op.mode + 1 << ')';
    out << '\n';
  }
}

std::string to_text(const LadderPolynomial& poly) {
  std::ostringstream out;
  write_polynomial(out, poly);
  return out.str();
}

LadderPolynomial parse_polynomial(const std::string& text) {
  static const std::regex line_re(R"(^\s*(\([^)]*\)|[^\s*]+)\s*\*\s*(.*?)\s*$)");
  static const std::regex complex_re(R"(^\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)$)");
  static const std::regex op_re(R"(a('?)\((\d+)\))");

  std::vector<LadderMonomial> terms;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::smatch match;
    if (!std::regex_match(line, match, line_re)) {
      throw std::invalid_argument(fmt::format("line {}: expected 'coeff * ops'", line_number));
    }
    LadderMonomial term;
    const std::string coefficient = match[1].str();
    try {
      std::smatch parts;
      if (std::regex_match(coefficient, parts, complex_re)) {
        term.coefficient = {std::stod(parts[1].str()), std::stod(parts[2].str())};
      } else {
        term.coefficient = std::stod(coefficient);
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument(fmt::format("line {}: bad coefficient '{}'", line_number, coefficient));
    }
    std::string ops = match[2].str();
    if (ops != "1") {
      auto begin = std::sregex_iterator(ops.begin(), ops.end(), op_re);
      std::string leftover = std::regex_replace(ops, op_re, "");
      if (leftover.find_first_not_of(" \t") != std::string::npos) {
        throw std::invalid_argument(fmt::format("line {}: unrecognized operator text '{}'", line_number, ops));
      }
      for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const int mode = std::stoi((*it)[2].str());
        if (mode < 1) throw std::invalid_argument(fmt::format("line {}: modes are 1-based", line_number));
        term.ops.push_back({mode - 1, (*it)[1].length() > 0 ? LadderKind::creation : LadderKind::annihilation});
      }
    }
    terms.push_back(std::move(term));
  }
  return LadderPolynomial(std::move(terms));
}

}  // namespace cvvqe
