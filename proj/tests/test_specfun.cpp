#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hitchin/specfun.hpp"

using namespace hitchin;

namespace {

constexpr double kPi = std::numbers::pi;

// test-side adaptive Simpson (real or complex), independent of the library path
template <typename F, typename T>
T simpson_rec(const F& f, double a, double b, T fa, T fm, T fb, double tol, int depth) {
  double m = 0.5 * (a + b);
  T flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  T left = (b - a) / 12.0 * (fa + 4.0 * flm + fm);
  T right = (b - a) / 12.0 * (fm + 4.0 * frm + fb);
  T d = left + right - whole;
  if (depth <= 0 || std::abs(d) < 15.0 * tol) return left + right + d / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

template <typename T = double, typename F>
T simpson(const F& f, double a, double b, double tol) {
  return simpson_rec(f, a, b, f(a), f(0.5 * (a + b)), f(b), tol, 40);
}

// oracle: K0(x) = int_0^inf exp(-x cosh u) du by direct quadrature
double k0_oracle(double x) {
  double U = std::acosh(45.0 / x + 1.0) + 1.0;
  auto f = [&](double u) { return std::exp(-x * std::cosh(u)); };
  return simpson(f, 0.0, U, 1e-16);
}

// oracle: complete elliptic integral by direct quadrature on the defining form
cplx elliptic_oracle(cplx k) {
  auto f = [&](double th) {
    double s = std::sin(th);
    return 1.0 / std::sqrt(cplx(1.0) - k * k * s * s);
  };
  return simpson<cplx>(f, 0.0, kPi / 2.0, 1e-14);
}

}  // namespace

TEST_CASE("bessel K0 against the integral-representation oracle") {
  CHECK(bessel_k0(1.0) == doctest::Approx(k0_oracle(1.0)).epsilon(1e-12));
  CHECK(bessel_k0(10.0) == doctest::Approx(k0_oracle(10.0)).epsilon(1e-12));
  // frozen oracle values
  CHECK(bessel_k0(1.0) == doctest::Approx(0.42102443824070833).epsilon(1e-12));
  CHECK(bessel_k0(10.0) == doctest::Approx(1.7780062316167652e-5).epsilon(1e-12));
  // both sides of the series/quadrature crossover against reference values
  CHECK(bessel_k0(1.999999) == doctest::Approx(0.11389401261550715).epsilon(1e-13));
  CHECK(bessel_k0(2.000001) == doctest::Approx(0.11389373288374351).epsilon(1e-13));
}

TEST_CASE("bessel K0 leading asymptotic") {
  double x = 50.0;
  double scaled = bessel_k0(x) * std::exp(x) * std::sqrt(2.0 * x / kPi);
  CHECK(std::abs(scaled - 1.0) < 0.01);
}

TEST_CASE("bessel K1 and log/ratio forms") {
  CHECK(bessel_k1(1.0) == doctest::Approx(0.60190723019723458).epsilon(1e-11));
  CHECK(bessel_k1(10.0) == doctest::Approx(1.8648773453825582e-5).epsilon(1e-11));
  // Wronskian-style consistency at the series/quadrature seam
  for (double x : {0.5, 1.5, 2.5, 8.0}) {
    CHECK(log_bessel_k0(x) == doctest::Approx(std::log(bessel_k0(x))).epsilon(1e-12));
    CHECK(bessel_k1_over_k0(x) ==
          doctest::Approx(bessel_k1(x) / bessel_k0(x)).epsilon(1e-12));
  }
  // deep-tail log form stays finite and tracks the asymptotic series
  double big = 2000.0;
  double lg = log_bessel_k0(big);
  double asy = -big + 0.5 * std::log(kPi / (2.0 * big)) + std::log1p(-1.0 / (8.0 * big));
  CHECK(lg == doctest::Approx(asy).epsilon(1e-6));
  CHECK_THROWS_AS(bessel_k0(0.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k0(-1.0), std::domain_error);
}

TEST_CASE("elliptic K at distinguished points") {
  CHECK(elliptic_K(cplx(0.0)).real() == kPi / 2.0);  // AGM(1,1) is exact
  CHECK(elliptic_K(cplx(0.0)).imag() == 0.0);
  cplx khalf = std::sqrt(cplx(0.5));
  CHECK(std::abs(elliptic_K(khalf) - elliptic_oracle(khalf)) < 1e-12);
  CHECK(elliptic_K(khalf).real() == doctest::Approx(1.8540746773013719).epsilon(1e-13));
  cplx k6 = std::polar(1.0, -kPi / 6.0);
  CHECK(std::abs(elliptic_K(k6) - elliptic_oracle(k6)) < 1e-10);
}

TEST_CASE("elliptic K dual-method agreement on a complex grid") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-0.85, 0.85);
  int n = 0;
  while (n < 50) {
    cplx k(U(rng), U(rng));
    if (std::abs(k) > 0.9) continue;
    ++n;
    CHECK(std::abs(elliptic_K(k) - elliptic_oracle(k)) < 1e-10);
  }
  CHECK_THROWS_AS(elliptic_K(cplx(1.5, 0.0)), std::domain_error);
}

TEST_CASE("modular lambda at distinguished points") {
  CHECK(std::abs(modular_lambda(cplx(0.0, 1.0)) - cplx(0.5)) < 1e-12);
  CHECK(std::abs(modular_lambda(cplx(0.0, 5.0))) < 1e-5);
  cplx omega = std::polar(1.0, 2.0 * kPi / 3.0);
  CHECK(std::abs(modular_lambda(omega) - std::polar(1.0, -kPi / 3.0)) < 1e-10);
}

TEST_CASE("modular lambda functional equations") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> Ur(-1.0, 1.0), Ui(0.4, 2.0);
  for (int k = 0; k < 40; ++k) {
    cplx tau(Ur(rng), Ui(rng));
    CHECK(std::abs(modular_lambda(tau + 2.0) - modular_lambda(tau)) < 1e-10);
    CHECK(std::abs(modular_lambda(-1.0 / tau) - (cplx(1.0) - modular_lambda(tau))) <
          1e-10);
  }
}

TEST_CASE("modular lambda derivative matches finite differences") {
  cplx tau(0.3, 1.2);
  double h = 1e-6;
  cplx fd = (modular_lambda(tau + h) - modular_lambda(tau - h)) / (2.0 * h);
  CHECK(std::abs(modular_lambda_derivative(tau) - fd) < 1e-8);
  cplx fdi = (modular_lambda(tau + cplx(0, h)) - modular_lambda(tau - cplx(0, h))) /
             cplx(0, 2.0 * h);
  CHECK(std::abs(modular_lambda_derivative(tau) - fdi) < 1e-8);
}

TEST_CASE("inverse modular lambda: principal values and round trips") {
  cplx tau_half = inverse_modular_lambda(cplx(0.5));
  CHECK(std::abs(tau_half - cplx(0.0, 1.0)) < 1e-12);

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int n = 0;
  while (n < 100) {
    cplx l(U(rng), U(rng));
    if (std::abs(l) > 0.95 || std::abs(l) < 0.05 || std::abs(l - cplx(1.0)) < 0.05)
      continue;
    ++n;
    cplx tau = inverse_modular_lambda(l);
    CHECK(tau.imag() > 0.0);
    CHECK(std::abs(modular_lambda(tau) - l) < 1e-10);
  }
  CHECK_THROWS_AS(inverse_modular_lambda(cplx(0.0)), std::domain_error);
  CHECK_THROWS_AS(inverse_modular_lambda(cplx(1.0)), std::domain_error);
}

TEST_CASE("inverse modular lambda: real values off (0,1) route around the cut") {
  // negative real l (the principal K(sqrt(1-l)) would land on [1, inf))
  for (double lr : {-0.5, -2.0, -10.0}) {
    cplx tau = inverse_modular_lambda(cplx(lr));
    CHECK(tau.imag() > 0.0);
    CHECK(std::abs(modular_lambda(tau) - cplx(lr)) < 1e-10 * std::max(1.0, -lr));
  }
  // l > 1 routes through lambda(-1/tau) = 1 - lambda
  for (double lr : {1.5, 3.0}) {
    cplx tau = inverse_modular_lambda(cplx(lr));
    CHECK(tau.imag() > 0.0);
    CHECK(std::abs(modular_lambda(tau) - cplx(lr)) < 1e-10 * lr);
  }
}

TEST_CASE("inverse modular lambda: corner representative") {
  cplx l = std::polar(1.0, -kPi / 3.0);
  cplx omega = std::polar(1.0, 2.0 * kPi / 3.0);
  cplx tau = inverse_modular_lambda(l);
  CHECK(std::abs(modular_lambda(tau) - l) < 1e-10);
  // the documented Gamma(2) representative at the corner
  CHECK(std::abs(gamma2_nearest(tau, omega) - omega) < 1e-9);
}

TEST_CASE("inverse composes with lambda on the fundamental domain") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> Ur(-0.9, 0.9), Ui(0.9, 2.2);
  for (int k = 0; k < 30; ++k) {
    cplx tau(Ur(rng), Ui(rng));
    cplx back = inverse_modular_lambda(modular_lambda(tau));
    CHECK(std::abs(gamma2_nearest(back, tau) - tau) < 1e-9);
  }
}

TEST_CASE("gamma2 matrices act by lambda invariance") {
  const auto& mats = gamma2_matrices();
  CHECK(mats.size() > 50);
  cplx tau(0.37, 1.1);
  cplx l = modular_lambda(tau);
  for (size_t i = 0; i < std::min<size_t>(mats.size(), 40); ++i) {
    cplx im = gamma2_apply(mats[i], tau);
    CHECK(im.imag() > 0.0);
    CHECK(std::abs(modular_lambda(im) - l) < 1e-9);
  }
}
