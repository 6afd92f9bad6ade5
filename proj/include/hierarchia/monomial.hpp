#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace hierarchia {

// Multi-index of a monomial: entries[i] is the power of x_{i+1}.
using Exponent = std::vector<int>;

int total_degree(const Exponent& a);
Exponent exponent_sum(const Exponent& a, const Exponent& b);

// Graded lexicographic order: lower total degree first, ties broken so that
// x1-heavy monomials come first (1, x1, x2, x1^2, x1*x2, x2^2, ...).
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

std::uint64_t binomial(int n, int k);

struct ExponentHash {
  std::size_t operator()(const Exponent& a) const;
};

// All monomials of n variables with total degree <= d, in grlex order,
// with O(1) lookup from exponent to position.
class MonomialBasis {
 public:
  MonomialBasis(int n, int d);

  int vars() const { return n_; }
  int degree() const { return d_; }
  int size() const { return static_cast<int>(list_.size()); }
  const Exponent& operator[](int i) const { return list_[i]; }
  const std::vector<Exponent>& monomials() const { return list_; }

  // -1 when the exponent is outside the basis.
  int index_of(const Exponent& a) const;

 private:
  int n_;
  int d_;
  std::vector<Exponent> list_;
  std::unordered_map<Exponent, int, ExponentHash> index_;
};

}  // namespace hierarchia
