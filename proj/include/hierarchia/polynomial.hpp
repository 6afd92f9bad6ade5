#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "hierarchia/monomial.hpp"

namespace hierarchia {

// Sparse real multivariate polynomial in canonical form: no stored
// coefficient is zero, terms keyed by exponent in grlex order.
class Polynomial {
 public:
  using TermMap = std::map<Exponent, double, GrlexLess>;

  explicit Polynomial(int n = 1) : n_(n) {}

  static Polynomial zero(int n) { return Polynomial(n); }
  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);  // x_{i+1}, 0-based i
  static Polynomial monomial(Exponent a, double c = 1.0);

  int vars() const { return n_; }
  // -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  double coeff(const Exponent& a) const;
  // max |coefficient|; 0 for the zero polynomial.
  double coeff_inf_norm() const;
  void add_term(const Exponent& a, double c);

  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator-(Polynomial p) { return p *= -1.0; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator+(Polynomial p, double c) { return p += constant(p.vars(), c); }
  friend Polynomial operator-(Polynomial p, double c) { return p += constant(p.vars(), -c); }

  Polynomial pow(int e) const;
  Polynomial derivative(int i) const;

  double evaluate(const Eigen::VectorXd& u) const;

  std::string to_string() const;

 private:
  int n_;
  TermMap terms_;
};

// ell x ell symmetric matrix with polynomial entries, upper triangle stored.
class SymmetricMatrixPolynomial {
 public:
  SymmetricMatrixPolynomial(int n, int ell);

  int vars() const { return n_; }
  int size() const { return ell_; }
  const Polynomial& at(int i, int j) const;
  void set(int i, int j, Polynomial p);
  // max over entries; -1 when all entries are zero.
  int degree() const;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& u) const;

 private:
  int upper_index(int i, int j) const;
  int n_;
  int ell_;
  std::vector<Polynomial> upper_;
};

std::vector<Polynomial> gradient(const Polynomial& p);
SymmetricMatrixPolynomial hessian(const Polynomial& p);

// Defining polynomials of the rank-deficiency locus of [grad f, grad h_1, ..., grad h_m]:
// phi_j sums the (m+1)x(m+1) row minors whose index sum is (m+1)(m+2)/2 + j - 1,
// giving K = (m+1)(n-m-1)+1 polynomials. With m = 0 this degenerates to grad f.
std::vector<Polynomial> critical_minors(const Polynomial& f,
                                        const std::vector<Polynomial>& h);

}  // namespace hierarchia
