#pragma once

#include <array>
#include <complex>
#include <vector>

namespace hitchin {

using cplx = std::complex<double>;

// Modified Bessel function of the second kind, order 0 and 1.
// Series below x = 2; above, quadrature of the integral representation
// int_0^inf exp(-x cosh u) du with the exp(-x)/sqrt(x) factor pulled out.
// Relative accuracy ~1e-13. Throws std::domain_error for x <= 0.
double bessel_k0(double x);
double bessel_k1(double x);

// log K0(x) and the ratio K1/K0, stable far beyond the underflow point of
// K0 itself (needed for fiducial tails at rho of order 10^3).
double log_bessel_k0(double x);
double bessel_k1_over_k0(double x);

// Complete elliptic integral of the first kind on the principal branch,
// K(k) = int_0^{pi/2} (1 - k^2 sin^2 t)^{-1/2} dt, via the complex AGM.
// Throws std::domain_error when k^2 lands on the cut [1, inf).
cplx elliptic_K(cplx k);

// Jacobi theta null values theta_2(0|tau), theta_3(0|tau), theta_4(0|tau).
// Series in q = exp(i pi tau), truncated when terms drop below 1e-16.
cplx theta2_null(cplx tau);
cplx theta3_null(cplx tau);
cplx theta4_null(cplx tau);

// Modular lambda, lambda(tau) = theta_2^4 / theta_3^4, Im tau > 0.
cplx modular_lambda(cplx tau);

// d lambda / d tau = i pi lambda (1 - lambda) theta_3^4 (used by Newton).
cplx modular_lambda_derivative(cplx tau);

// Principal inverse: tau0 = i K(sqrt(1-l)) / K(sqrt(l)), refined by complex
// Newton on lambda(tau) - l to residual <= 1e-12. The Gamma(2) representative
// is this principal one; sweeps that need a different representative pick the
// nearest Gamma(2) image (see gamma2_images / gamma2_nearest).
// Throws std::domain_error for l in {0, 1} and std::runtime_error when Newton
// stalls.
cplx inverse_modular_lambda(cplx l);

// Moebius images of tau under a fixed, deterministically enumerated ball of
// Gamma(2) matrices (|entries| bounded), identity first.
const std::vector<std::array<long, 4>>& gamma2_matrices();
cplx gamma2_apply(const std::array<long, 4>& m, cplx tau);
cplx gamma2_nearest(cplx tau, cplx target);

}  // namespace hitchin
