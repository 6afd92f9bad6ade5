#include "hierarchia/monomial.hpp"

#include <stdexcept>

namespace hierarchia {

int total_degree(const Exponent& a) {
  int s = 0;
  for (int e : a) s += e;
  return s;
}

Exponent exponent_sum(const Exponent& a, const Exponent& b) {
  Exponent c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

std::size_t ExponentHash::operator()(const Exponent& a) const {
  std::size_t h = 1469598103934665603ull;
  for (int e : a) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

void emit_degree(int remaining, int pos, Exponent& cur, std::vector<Exponent>& out) {
  if (pos + 1 == static_cast<int>(cur.size())) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    emit_degree(remaining - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(int n, int d) : n_(n), d_(d) {
  if (n < 1 || d < 0) throw std::invalid_argument("MonomialBasis: need n >= 1, d >= 0");
  list_.reserve(binomial(n + d, d));
  Exponent cur(n, 0);
  for (int deg = 0; deg <= d; ++deg) emit_degree(deg, 0, cur, list_);
  index_.reserve(list_.size() * 2);
  for (int i = 0; i < static_cast<int>(list_.size()); ++i) index_.emplace(list_[i], i);
}

int MonomialBasis::index_of(const Exponent& a) const {
  auto it = index_.find(a);
  return it == index_.end() ? -1 : it->second;
}

}  // namespace hierarchia
