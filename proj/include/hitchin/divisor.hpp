#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hitchin/poly.hpp"

namespace hitchin {

enum class PoleKind { untwisted, twisted, tame };

const char* pole_kind_name(PoleKind k);

// A point of CP^1: finite z-coordinate or the point at infinity.
struct PoleLocation {
  bool at_infinity = false;
  cplx z = 0.0;

  static PoleLocation infinity() { return {true, 0.0}; }
  static PoleLocation at(cplx z) { return {false, z}; }
  friend bool operator==(const PoleLocation& a, const PoleLocation& b) {
    return a.at_infinity == b.at_infinity && (a.at_infinity || a.z == b.z);
  }
};

struct PoleDatum {
  PoleLocation location;
  int order = 1;  // m_x
  PoleKind kind = PoleKind::tame;
  // mu_{x,a} for a = m_x+1 ... 2 m_x, ascending in a; empty for tame poles.
  std::vector<cplx> mu;
  double weight1 = 0.25;  // alpha_{x,1}
  double weight2 = 0.75;  // alpha_{x,2}

  cplx mu_at(int a) const;  // a in [m+1, 2m]
};

struct IrregularDivisor {
  std::vector<PoleDatum> poles;

  int total_order() const;  // N = sum m_x
  int pole_count() const { return static_cast<int>(poles.size()); }
  bool has_tame() const;
  bool has_infinity() const;
  // Pole the asymptotic analysis is organized around: the irregular pole at
  // the origin when present, else the first untwisted one, else the first
  // twisted one.
  int designated_pole() const;
  void validate() const;  // throws std::invalid_argument with a field message
};

struct BasePoint {
  IrregularDivisor divisor;
  std::vector<cplx> free_coeffs;   // nu_0 ... nu_{N-4}
  std::vector<double> scalings;    // f_i values applied to free_coeffs
  // y_x choices for order-two poles, keyed by pole index.
  std::map<int, PoleLocation> y_choices;
  std::vector<std::string> warnings;

  cplx scaled_coeff(int b) const { return free_coeffs[b] * scalings[b]; }
};

// Assembles a base point with the divisor's mu principal parts and the given
// scaled free coefficients. scalings may be empty (all ones). For order-two
// poles any missing y_x defaults to the lexicographically smallest other pole.
// The growth constraint on the scalings relative to the last slot is checked
// and reported through BasePoint::warnings, not as an error.
BasePoint build_base_point(const IrregularDivisor& divisor,
                           const std::vector<cplx>& free_coeffs,
                           const std::vector<double>& scalings = {});

// prod over finite poles (z-x)^{2 m_x} * nu(z); degree <= 2N-4 with the
// deficit recorded by the divisor's data at infinity. Twisted/tame centers
// appear as forced roots.
ComplexPolynomial tilde_nu(const BasePoint& base);

// tilde_nu with the forced simple roots at finite twisted centers divided
// out; matches the per-case cleared polynomials used by the four-dimensional
// studies.
ComplexPolynomial tilde_nu_reduced(const BasePoint& base);

// The w-chart counterpart, w^{2N-4} tilde_nu(1/w); forced roots at infinity
// become roots at w = 0.
ComplexPolynomial tilde_nu_w_chart(const BasePoint& base);

// nu(z) as a rational function of the finite chart coordinate.
cplx eval_nu(const BasePoint& base, cplx z);

// Error-decay exponent sigma of the glued approximate solution.
struct Sigma {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / den; }
};
Sigma compute_sigma(const IrregularDivisor& divisor);

// Diagonal local-model coefficients rho_{x,m_x} ... rho_{x,1} at an untwisted
// pole (returned ascending in j: rho_1 ... rho_m). Sign convention fixed by
// the requirement that -(sum_j rho_j z^{-j})^2 reproduces the mu principal
// part; verified internally, throws on mismatch.
std::vector<cplx> local_diagonal_data(const IrregularDivisor& divisor, int pole_index);

// The recursion underlying local_diagonal_data over any field: given
// rho_m with rho_m^2 = -mu_{2m} and mu_{m+1..2m-1}, produce rho_1..rho_m.
// mu is ascending in a = m+1 ... 2m (the last entry is mu_{2m}).
template <typename F>
std::vector<F> diag_rho_from_leading(const F& rho_m, const std::vector<F>& mu) {
  const int m = static_cast<int>(mu.size());
  std::vector<F> rho(m);  // rho[j-1] = rho_j
  rho[m - 1] = rho_m;
  const F minus_two_rho_m = -(rho_m + rho_m);
  for (int j = m - 1; j >= 1; --j) {
    F acc = mu[j - 1];  // mu_{j+m}
    for (int k = 1; k <= m - j - 1; ++k) acc = acc + rho[j + k - 1] * rho[m - k - 1];
    rho[j - 1] = acc / minus_two_rho_m;
  }
  return rho;
}

// Coefficients of -(sum_j rho_j z^{-j})^2 for exponents z^{-a}, a = m+1..2m,
// ascending in a; the verification side of the recursion.
template <typename F>
std::vector<F> diag_principal_part(const std::vector<F>& rho) {
  const int m = static_cast<int>(rho.size());
  std::vector<F> out(m);
  for (int a = m + 1; a <= 2 * m; ++a) {
    F acc = rho[0] - rho[0];  // zero of the field
    for (int i = 1; i <= m; ++i) {
      int k = a - i;
      if (k >= 1 && k <= m) acc = acc + rho[i - 1] * rho[k - 1];
    }
    out[a - m - 1] = -acc;
  }
  return out;
}

// dim M_m of the stratum containing bundles O(m) + O(-|S|-m).
// Throws std::out_of_range outside ceil(-|S|/2) <= m <= floor((-|S|+N-2)/2).
int stratum_dimension(const IrregularDivisor& divisor, int m);

// deg of the spectral line bundle, deg E + N - 2.
int spectral_line_degree(const IrregularDivisor& divisor, int degE);

// JSON round trip (schema: poles with [re,im] pairs, "inf" markers).
std::string divisor_to_json(const IrregularDivisor& d);
IrregularDivisor divisor_from_json(const std::string& text);
std::string base_point_to_json(const BasePoint& b);
BasePoint base_point_from_json(const std::string& text);

}  // namespace hitchin
