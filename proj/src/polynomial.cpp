#include "hierarchia/polynomial.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace hierarchia {

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(Exponent(n, 0), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  if (i < 0 || i >= n) throw std::invalid_argument("variable index out of range");
  Polynomial p(n);
  Exponent a(n, 0);
  a[i] = 1;
  p.add_term(a, 1.0);
  return p;
}

Polynomial Polynomial::monomial(Exponent a, double c) {
  Polynomial p(static_cast<int>(a.size()));
  p.add_term(std::move(a), c);
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  // grlex keys ascend by total degree, so the last term is maximal.
  return total_degree(terms_.rbegin()->first);
}

double Polynomial::coeff(const Exponent& a) const {
  auto it = terms_.find(a);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::coeff_inf_norm() const {
  double m = 0.0;
  for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void Polynomial::add_term(const Exponent& a, double c) {
  if (static_cast<int>(a.size()) != n_) throw std::invalid_argument("exponent size mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(a, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  if (q.n_ != n_) throw std::invalid_argument("variable count mismatch");
  for (const auto& [a, c] : q.terms_) add_term(a, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  if (q.n_ != n_) throw std::invalid_argument("variable count mismatch");
  for (const auto& [a, c] : q.terms_) add_term(a, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [a, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (p.n_ != q.n_) throw std::invalid_argument("variable count mismatch");
  Polynomial r(p.n_);
  for (const auto& [a, ca] : p.terms_) {
    for (const auto& [b, cb] : q.terms_) {
      r.add_term(exponent_sum(a, b), ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("negative power");
  Polynomial r = constant(n_, 1.0);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return r;
}

Polynomial Polynomial::derivative(int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("derivative index out of range");
  Polynomial r(n_);
  for (const auto& [a, c] : terms_) {
    if (a[i] == 0) continue;
    Exponent b = a;
    b[i] -= 1;
    r.add_term(b, c * a[i]);
  }
  return r;
}

double Polynomial::evaluate(const Eigen::VectorXd& u) const {
  if (u.size() != n_) throw std::invalid_argument("evaluation point dimension mismatch");
  double s = 0.0;
  for (const auto& [a, c] : terms_) {
    double m = c;
    for (int i = 0; i < n_; ++i) {
      double b = u[i];
      int e = a[i];
      while (e > 0) {
        if (e & 1) m *= b;
        b *= b;
        e >>= 1;
      }
    }
    s += m;
  }
  return s;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : terms_) {
    double v = c;
    if (first) {
      if (v < 0) {
        os << "-";
        v = -v;
      }
    } else {
      os << (v < 0 ? " - " : " + ");
      v = std::abs(v);
    }
    first = false;
    bool has_var = total_degree(a) > 0;
    if (!has_var || v != 1.0) {
      os << v;
      if (has_var) os << "*";
    }
    bool first_var = true;
    for (int i = 0; i < n_; ++i) {
      if (a[i] == 0) continue;
      if (!first_var) os << "*";
      first_var = false;
      os << "x" << (i + 1);
      if (a[i] > 1) os << "^" << a[i];
    }
  }
  return os.str();
}

SymmetricMatrixPolynomial::SymmetricMatrixPolynomial(int n, int ell)
    : n_(n), ell_(ell), upper_(static_cast<std::size_t>(ell) * (ell + 1) / 2, Polynomial(n)) {
  if (ell < 1) throw std::invalid_argument("matrix polynomial needs size >= 1");
}

int SymmetricMatrixPolynomial::upper_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  return i * ell_ - i * (i - 1) / 2 + (j - i);
}

const Polynomial& SymmetricMatrixPolynomial::at(int i, int j) const {
  return upper_[upper_index(i, j)];
}

void SymmetricMatrixPolynomial::set(int i, int j, Polynomial p) {
  if (p.vars() != n_) throw std::invalid_argument("variable count mismatch");
  upper_[upper_index(i, j)] = std::move(p);
}

int SymmetricMatrixPolynomial::degree() const {
  int d = -1;
  for (const auto& p : upper_) d = std::max(d, p.degree());
  return d;
}

Eigen::MatrixXd SymmetricMatrixPolynomial::evaluate(const Eigen::VectorXd& u) const {
  Eigen::MatrixXd M(ell_, ell_);
  for (int i = 0; i < ell_; ++i) {
    for (int j = i; j < ell_; ++j) {
      M(i, j) = M(j, i) = at(i, j).evaluate(u);
    }
  }
  return M;
}

std::vector<Polynomial> gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(p.vars());
  for (int i = 0; i < p.vars(); ++i) g.push_back(p.derivative(i));
  return g;
}

SymmetricMatrixPolynomial hessian(const Polynomial& p) {
  const int n = p.vars();
  SymmetricMatrixPolynomial H(n, n);
  for (int i = 0; i < n; ++i) {
    Polynomial pi = p.derivative(i);
    for (int j = i; j < n; ++j) H.set(i, j, pi.derivative(j));
  }
  return H;
}

namespace {

// Determinant of a square polynomial matrix by expansion along the first
// column; rows is the active row subset, col the current column.
Polynomial poly_det(const std::vector<std::vector<Polynomial>>& M,
                    std::vector<int>& rows, int col, int n) {
  if (rows.size() == 1) return M[rows[0]][col];
  Polynomial det(n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int row = rows[r];
    rows.erase(rows.begin() + r);
    Polynomial minor = poly_det(M, rows, col + 1, n);
    rows.insert(rows.begin() + r, row);
    Polynomial contrib = M[row][col] * minor;
    if (r % 2 == 1) contrib *= -1.0;
    det += contrib;
  }
  return det;
}

void for_each_subset(int n, int k, int start, std::vector<int>& cur,
                     const std::function<void(const std::vector<int>&)>& fn) {
  if (static_cast<int>(cur.size()) == k) {
    fn(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    for_each_subset(n, k, i + 1, cur, fn);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Polynomial> critical_minors(const Polynomial& f,
                                        const std::vector<Polynomial>& h) {
  const int n = f.vars();
  const int m = static_cast<int>(h.size());
  if (m >= n) throw std::invalid_argument("critical_minors: need m < n");
  for (const auto& hi : h) {
    if (hi.vars() != n) throw std::invalid_argument("variable count mismatch");
  }
  if (m == 0) return gradient(f);

  // Column c of J is: c = 0 -> grad f, c = i -> grad h_i.
  std::vector<std::vector<Polynomial>> J(n, std::vector<Polynomial>(m + 1, Polynomial(n)));
  for (int r = 0; r < n; ++r) {
    J[r][0] = f.derivative(r);
    for (int c = 0; c < m; ++c) J[r][c + 1] = h[c].derivative(r);
  }

  const int K = (m + 1) * (n - m - 1) + 1;
  const int base_sum = (m + 1) * (m + 2) / 2;  // 1 + 2 + ... + (m+1), 1-based rows
  std::vector<Polynomial> phi(K, Polynomial(n));
  std::vector<int> cur;
  for_each_subset(n, m + 1, 0, cur, [&](const std::vector<int>& rows) {
    int sum = 0;
    for (int r : rows) sum += r + 1;
    const int j = sum - base_sum;  // 0-based bucket
    std::vector<int> rset = rows;
    phi[j] += poly_det(J, rset, 0, n);
  });
  return phi;
}

}  // namespace hierarchia
