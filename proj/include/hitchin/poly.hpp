#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hitchin {

using cplx = std::complex<double>;

// Which affine chart of CP^1 a polynomial's variable lives in (w = 1/z).
enum class Chart { z, w };

inline const char* chart_name(Chart c) { return c == Chart::z ? "z" : "w"; }

// Dense polynomial with complex coefficients, ascending degree.
struct ComplexPolynomial {
  std::vector<cplx> coeffs;  // coeffs[k] multiplies x^k
  Chart chart = Chart::z;

  ComplexPolynomial() = default;
  explicit ComplexPolynomial(std::vector<cplx> c, Chart ch = Chart::z)
      : coeffs(std::move(c)), chart(ch) {}

  int degree() const;  // after trailing-zero stripping; -1 for the zero polynomial
  cplx leading() const;
  cplx eval(cplx x) const;
  ComplexPolynomial derivative() const;

  // Drops leading coefficients with |c| <= tol * max|c|.
  ComplexPolynomial normalized(double tol = 0.0) const;

  ComplexPolynomial operator+(const ComplexPolynomial& o) const;
  ComplexPolynomial operator*(const ComplexPolynomial& o) const;
  ComplexPolynomial& operator+=(const ComplexPolynomial& o);

  bool is_zero() const;
};

ComplexPolynomial scale(const ComplexPolynomial& p, cplx s);
ComplexPolynomial monomial(int k, cplx c, Chart chart = Chart::z);
ComplexPolynomial from_roots(const std::vector<cplx>& roots, cplx lead = 1.0,
                             Chart chart = Chart::z);

// x^n * p(1/x) for the declared total degree n (>= deg p); flips the chart.
// Forced roots "at infinity" of p become roots at 0 of the reversal.
ComplexPolynomial reverse_to_degree(const ComplexPolynomial& p, int n);

// (z - x)^k as a polynomial.
ComplexPolynomial linear_power(cplx x, int k, Chart chart = Chart::z);

struct RootFindOptions {
  int max_iterations = 500;
  double tolerance = 1e-14;  // backward-error stop, relative to evaluation scale
};

// All complex roots with multiplicity via Ehrlich-Aberth simultaneous
// iteration. Deterministic initialization on a circle sized from coefficient
// bounds, so the output ordering is reproducible run to run.
// Throws std::invalid_argument for the zero/constant polynomial and
// std::runtime_error on non-convergence.
std::vector<cplx> find_roots(const ComplexPolynomial& p,
                             const RootFindOptions& opts = {});

// |p(x)| bound scale sum |c_k| |x|^k, used for backward-error acceptance.
double evaluation_scale(const ComplexPolynomial& p, cplx x);

}  // namespace hitchin
