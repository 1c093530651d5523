#pragma once

#include <complex>
#include <initializer_list>
#include <string>
#include <vector>

namespace kmt {

using cplx = std::complex<double>;

/// Real polynomial, coefficients stored in ascending order of power.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) {}
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  static Polynomial monomial(int power, double coeff = 1.0);

  /// Coefficient of x^k (zero beyond the stored range).
  double operator[](int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : 0.0;
  }
  const std::vector<double>& coefficients() const { return c_; }

  /// Index of the highest coefficient with |c_k| > tol * max|c|; -1 for the
  /// zero polynomial.
  int degree(double rel_tol = 0.0) const;
  bool is_zero(double rel_tol = 0.0) const { return degree(rel_tol) < 0; }
  double max_abs_coefficient() const;

  double operator()(double x) const;
  cplx operator()(cplx x) const;

  Polynomial derivative() const;
  /// Drop leading coefficients that are negligible relative to the largest.
  Polynomial trimmed(double rel_tol = 0.0) const;

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(double s, const Polynomial& p);

  std::string to_string(char var = 'x') const;

 private:
  std::vector<double> c_;
};

/// Roots of p via the eigenvalues of the balanced companion matrix, each
/// polished with `newton_steps` Newton iterations on the original
/// polynomial. Leading coefficients below `lead_tol` (relative) are trimmed
/// first, so the number of returned roots is the effective degree.
std::vector<cplx> polynomial_roots(const Polynomial& p, int newton_steps = 2,
                                   double lead_tol = 1e-14);

/// Realness test used throughout: |Im z| < tol * (1 + |z|).
inline bool is_effectively_real(cplx z, double tol = 1e-9) {
  return std::abs(z.imag()) < tol * (1.0 + std::abs(z));
}

}  // namespace kmt
