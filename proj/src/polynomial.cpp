#include "kmt/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kmt {

Polynomial Polynomial::monomial(int power, double coeff) {
  std::vector<double> c(static_cast<size_t>(power) + 1, 0.0);
  c.back() = coeff;
  return Polynomial(std::move(c));
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

int Polynomial::degree(double rel_tol) const {
  const double thresh = rel_tol * max_abs_coefficient();
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
    if (std::abs(c_[k]) > thresh) return k;
  }
  return -1;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

cplx Polynomial::operator()(cplx x) const {
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial{0.0};
  std::vector<double> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::trimmed(double rel_tol) const {
  const int deg = degree(rel_tol);
  if (deg < 0) return Polynomial{0.0};
  return Polynomial(std::vector<double>(c_.begin(), c_.begin() + deg + 1));
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  std::vector<double> r(std::max(p.c_.size(), q.c_.size()), 0.0);
  for (size_t k = 0; k < r.size(); ++k) r[k] = p[static_cast<int>(k)] + q[static_cast<int>(k)];
  return Polynomial(std::move(r));
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) {
  return p + (-1.0) * q;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (p.c_.empty() || q.c_.empty()) return Polynomial{0.0};
  std::vector<double> r(p.c_.size() + q.c_.size() - 1, 0.0);
  for (size_t i = 0; i < p.c_.size(); ++i)
    for (size_t j = 0; j < q.c_.size(); ++j) r[i + j] += p.c_[i] * q.c_[j];
  return Polynomial(std::move(r));
}

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> r = p.c_;
  for (double& v : r) v *= s;
  return Polynomial(std::move(r));
}

std::string Polynomial::to_string(char var) const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0.0) continue;
    if (!first) os << (c_[k] < 0 ? " - " : " + ");
    else if (c_[k] < 0) os << "-";
    os << std::abs(c_[k]);
    if (k >= 1) os << "*" << var;
    if (k >= 2) os << "^" << k;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

namespace {

// Parlett-Reinsch style balancing by powers of two.
void balance(Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      double row = 0.0, col = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        row += std::abs(m(i, j));
        col += std::abs(m(j, i));
      }
      if (row == 0.0 || col == 0.0) continue;
      int e = 0;
      std::frexp(row / col, &e);
      e /= 2;
      if (e == 0) continue;
      const double sc = std::ldexp(col, e), sr = std::ldexp(row, -e);
      if (sc + sr < 0.95 * (col + row)) {
        m.col(i) *= std::ldexp(1.0, e);
        m.row(i) *= std::ldexp(1.0, -e);
        changed = true;
      }
    }
  }
}

}  // namespace

std::vector<cplx> polynomial_roots(const Polynomial& p, int newton_steps,
                                   double lead_tol) {
  const Polynomial q = p.trimmed(lead_tol);
  const int deg = q.degree();
  std::vector<cplx> roots;
  if (deg <= 0) return roots;

  // Zero roots from vanishing trailing coefficients are exact.
  int low = 0;
  while (low < deg && q[low] == 0.0) {
    roots.emplace_back(0.0, 0.0);
    ++low;
  }
  const int n = deg - low;
  if (n == 1) {
    roots.emplace_back(-q[low] / q[low + 1], 0.0);
  } else if (n > 1) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    const double lead = q[deg];
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -q[low + i] / lead;
    balance(comp);
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
  }

  const Polynomial dq = q.derivative();
  for (cplx& z : roots) {
    for (int s = 0; s < newton_steps; ++s) {
      const cplx d = dq(z);
      if (std::abs(d) == 0.0) break;
      const cplx step = q(z) / d;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      // Polishing must not hop to a different root.
      if (std::abs(step) > 1e-3 * (1.0 + std::abs(z))) break;
      z -= step;
    }
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

}  // namespace kmt
