#include "hitchin/poly.hpp"

#include <algorithm>
#include <cmath>

namespace hitchin {

int ComplexPolynomial::degree() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    if (coeffs[k] != cplx(0.0)) return k;
  return -1;
}

cplx ComplexPolynomial::leading() const {
  int d = degree();
  return d < 0 ? cplx(0.0) : coeffs[d];
}

cplx ComplexPolynomial::eval(cplx x) const {
  cplx acc = 0.0;
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    acc = acc * x + coeffs[k];
  return acc;
}

ComplexPolynomial ComplexPolynomial::derivative() const {
  ComplexPolynomial d;
  d.chart = chart;
  if (coeffs.size() <= 1) {
    d.coeffs = {cplx(0.0)};
    return d;
  }
  d.coeffs.resize(coeffs.size() - 1);
  for (size_t k = 1; k < coeffs.size(); ++k)
    d.coeffs[k - 1] = coeffs[k] * static_cast<double>(k);
  return d;
}

ComplexPolynomial ComplexPolynomial::normalized(double tol) const {
  double m = 0.0;
  for (const auto& c : coeffs) m = std::max(m, std::abs(c));
  ComplexPolynomial out;
  out.chart = chart;
  int top = -1;
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    if (std::abs(coeffs[k]) > tol * m) {
      top = k;
      break;
    }
  }
  if (top < 0) {
    out.coeffs = {cplx(0.0)};
    return out;
  }
  out.coeffs.assign(coeffs.begin(), coeffs.begin() + top + 1);
  return out;
}

bool ComplexPolynomial::is_zero() const { return degree() < 0; }

ComplexPolynomial ComplexPolynomial::operator+(const ComplexPolynomial& o) const {
  ComplexPolynomial r = *this;
  r += o;
  return r;
}

ComplexPolynomial& ComplexPolynomial::operator+=(const ComplexPolynomial& o) {
  if (o.coeffs.size() > coeffs.size()) coeffs.resize(o.coeffs.size(), cplx(0.0));
  for (size_t k = 0; k < o.coeffs.size(); ++k) coeffs[k] += o.coeffs[k];
  return *this;
}

ComplexPolynomial ComplexPolynomial::operator*(const ComplexPolynomial& o) const {
  ComplexPolynomial r;
  r.chart = chart;
  if (coeffs.empty() || o.coeffs.empty()) return r;
  r.coeffs.assign(coeffs.size() + o.coeffs.size() - 1, cplx(0.0));
  for (size_t i = 0; i < coeffs.size(); ++i)
    for (size_t j = 0; j < o.coeffs.size(); ++j)
      r.coeffs[i + j] += coeffs[i] * o.coeffs[j];
  return r;
}

ComplexPolynomial scale(const ComplexPolynomial& p, cplx s) {
  ComplexPolynomial r = p;
  for (auto& c : r.coeffs) c *= s;
  return r;
}

ComplexPolynomial monomial(int k, cplx c, Chart chart) {
  ComplexPolynomial r;
  r.chart = chart;
  r.coeffs.assign(k + 1, cplx(0.0));
  r.coeffs[k] = c;
  return r;
}

ComplexPolynomial from_roots(const std::vector<cplx>& roots, cplx lead, Chart chart) {
  ComplexPolynomial r;
  r.chart = chart;
  r.coeffs = {lead};
  for (const auto& z : roots) {
    ComplexPolynomial lin;
    lin.coeffs = {-z, cplx(1.0)};
    r = r * lin;
  }
  r.chart = chart;
  return r;
}

ComplexPolynomial reverse_to_degree(const ComplexPolynomial& p, int n) {
  if (p.degree() > n) throw std::invalid_argument("reverse_to_degree: n below degree");
  ComplexPolynomial r;
  r.chart = p.chart == Chart::z ? Chart::w : Chart::z;
  r.coeffs.assign(n + 1, cplx(0.0));
  for (int k = 0; k <= p.degree(); ++k) r.coeffs[n - k] = p.coeffs[k];
  return r;
}

ComplexPolynomial linear_power(cplx x, int k, Chart chart) {
  ComplexPolynomial r;
  r.chart = chart;
  r.coeffs = {cplx(1.0)};
  ComplexPolynomial lin;
  lin.coeffs = {-x, cplx(1.0)};
  for (int i = 0; i < k; ++i) r = r * lin;
  r.chart = chart;
  return r;
}

double evaluation_scale(const ComplexPolynomial& p, cplx x) {
  double ax = std::abs(x), pw = 1.0, s = 0.0;
  for (const auto& c : p.coeffs) {
    s += std::abs(c) * pw;
    pw *= ax;
  }
  return s;
}

std::vector<cplx> find_roots(const ComplexPolynomial& poly, const RootFindOptions& opts) {
  ComplexPolynomial p = poly.normalized(0.0);
  int n = p.degree();
  if (n < 0) throw std::invalid_argument("find_roots: zero polynomial");
  if (n == 0) throw std::invalid_argument("find_roots: constant polynomial");

  // Strip exact roots at the origin up front; they are common here (forced
  // ramification points at twisted centers) and exact by construction.
  int zero_roots = 0;
  while (zero_roots < n && p.coeffs[zero_roots] == cplx(0.0)) ++zero_roots;
  std::vector<cplx> roots(zero_roots, cplx(0.0));
  if (zero_roots > 0)
    p.coeffs.erase(p.coeffs.begin(), p.coeffs.begin() + zero_roots);
  n -= zero_roots;
  if (n == 0) return roots;

  const cplx lead = p.coeffs[n];
  // Cauchy-style radius from coefficient bounds.
  double radius = 0.0;
  for (int k = 0; k < n; ++k) {
    double a = std::abs(p.coeffs[k] / lead);
    if (a > 0.0) radius = std::max(radius, 2.0 * std::pow(a, 1.0 / (n - k)));
  }
  if (radius == 0.0) {
    // p = lead * x^n was already handled by the zero-root stripping.
    radius = 1.0;
  }

  std::vector<cplx> x(n);
  for (int j = 0; j < n; ++j) {
    double th = 2.0 * M_PI * j / n + 0.7;  // fixed offset breaks symmetry locking
    x[j] = radius * cplx(std::cos(th), std::sin(th));
  }

  ComplexPolynomial dp = p.derivative();
  bool converged = false;
  for (int it = 0; it < opts.max_iterations && !converged; ++it) {
    converged = true;
    for (int j = 0; j < n; ++j) {
      cplx pj = p.eval(x[j]);
      double sc = evaluation_scale(p, x[j]);
      if (std::abs(pj) <= opts.tolerance * sc) continue;
      cplx dj = dp.eval(x[j]);
      cplx sum = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        cplx d = x[j] - x[k];
        if (d == cplx(0.0)) d = cplx(1e-300, 0.0);
        sum += 1.0 / d;
      }
      cplx newton = (dj != cplx(0.0)) ? pj / dj : pj;
      cplx denom = 1.0 - newton * sum;
      cplx step = (denom != cplx(0.0)) ? newton / denom : newton;
      x[j] -= step;
      if (std::abs(step) > 1e-14 * (1.0 + std::abs(x[j]))) converged = false;
    }
  }

  // Newton polish and backward-error acceptance.
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < 3; ++k) {
      cplx pj = p.eval(x[j]);
      cplx dj = dp.eval(x[j]);
      if (dj == cplx(0.0)) break;
      cplx step = pj / dj;
      if (std::abs(step) > 0.5 * (1.0 + std::abs(x[j]))) break;
      x[j] -= step;
    }
  }
  for (int j = 0; j < n; ++j) {
    double sc = evaluation_scale(p, x[j]);
    if (!(std::abs(p.eval(x[j])) <= 1e-10 * std::max(sc, 1e-300)))
      throw std::runtime_error("find_roots: iteration did not converge (root " +
                               std::to_string(j) + ")");
  }
  roots.insert(roots.end(), x.begin(), x.end());
  return roots;
}

}  // namespace hitchin
