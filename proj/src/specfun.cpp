#include "hitchin/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace hitchin {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209;

// I0, I1 power series; only needed below the series/quadrature crossover.
double bessel_i0_series(double x) {
  double q = x * x / 4.0, term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double bessel_i1_series(double x) {
  double q = x * x / 4.0, term = x / 2.0, sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1.0));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// K0 = -(log(x/2)+gamma) I0 + sum_{k>=1} H_k (x^2/4)^k / (k!)^2
double bessel_k0_series(double x) {
  double q = x * x / 4.0;
  double term = 1.0, hk = 0.0, sum = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    hk += 1.0 / k;
    sum += term * hk;
    if (term * hk < 1e-18 * std::max(sum, 1.0)) break;
  }
  return -(std::log(x / 2.0) + kEulerGamma) * bessel_i0_series(x) + sum;
}

// K1 = 1/x + log(x/2) I1 - (x/4) sum_{k>=0} (H_k + H_{k+1}) (x^2/4)^k / (k! (k+1)!)
double bessel_k1_series(double x) {
  double q = x * x / 4.0;
  double term = 1.0;  // (x^2/4)^k / (k! (k+1)!)
  double hk = 0.0, hk1 = 1.0, sum = term * (hk + hk1);
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1.0));
    hk += 1.0 / k;
    hk1 += 1.0 / (k + 1.0);
    sum += term * (hk + hk1);
    if (term * (hk + hk1) < 1e-18 * std::max(std::abs(sum), 1.0)) break;
  }
  return 1.0 / x + (std::log(x / 2.0) + kEulerGamma) * bessel_i1_series(x) -
         (x / 4.0) * sum;
}

// K_nu(x) = sqrt(2/x) e^{-x} int_0^inf e^{-y^2} g_nu(y) dy with
// g_0 = 1/sqrt(1+y^2/(2x)), g_1 = (1+y^2/x) / sqrt(1+y^2/(2x)),
// from u = 2 asinh(s), s = y/sqrt(2x). Trapezoid on the half line; the
// integrand is analytic and Gaussian-damped, h = 0.05 reaches ~1e-15.
void bessel_k_quadrature(double x, double* k0_over_pref, double* k1_over_pref) {
  const double h = 0.05;
  double s0 = 0.0, s1 = 0.0;
  // y = 0 endpoint gets half weight
  s0 += 0.5;
  s1 += 0.5;
  for (int j = 1;; ++j) {
    double y = h * j;
    double e = std::exp(-y * y);
    if (e < 1e-22) break;
    double c = 1.0 + y * y / (2.0 * x);
    double r = 1.0 / std::sqrt(c);
    s0 += e * r;
    s1 += e * (1.0 + y * y / x) * r;
  }
  *k0_over_pref = s0 * h * 2.0 / std::sqrt(kPi);  // normalized so pref = sqrt(pi/(2x)) e^{-x}
  *k1_over_pref = s1 * h * 2.0 / std::sqrt(kPi);
}

}  // namespace

double bessel_k0(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k0: x must be positive");
  if (x < 2.0) return bessel_k0_series(x);
  double a0, a1;
  bessel_k_quadrature(x, &a0, &a1);
  return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * a0;
}

double bessel_k1(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k1: x must be positive");
  if (x < 2.0) return bessel_k1_series(x);
  double a0, a1;
  bessel_k_quadrature(x, &a0, &a1);
  return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * a1;
}

double log_bessel_k0(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_bessel_k0: x must be positive");
  if (x < 2.0) return std::log(bessel_k0_series(x));
  double a0, a1;
  bessel_k_quadrature(x, &a0, &a1);
  return 0.5 * std::log(kPi / (2.0 * x)) - x + std::log(a0);
}

double bessel_k1_over_k0(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k1_over_k0: x must be positive");
  if (x < 2.0) return bessel_k1_series(x) / bessel_k0_series(x);
  double a0, a1;
  bessel_k_quadrature(x, &a0, &a1);
  return a1 / a0;
}

cplx elliptic_K(cplx k) {
  cplx k2 = k * k;
  if (k2.imag() == 0.0 && k2.real() >= 1.0)
    throw std::domain_error("elliptic_K: k^2 on the branch cut [1, inf)");
  cplx a = 1.0, b = std::sqrt(cplx(1.0) - k2);
  for (int it = 0; it < 80; ++it) {
    if (std::abs(a - b) <= 1e-16 * std::abs(a)) break;
    cplx am = 0.5 * (a + b);
    cplx gm = std::sqrt(a * b);
    // branch choice keeping the AGM on the principal sheet
    if (std::abs(am - gm) > std::abs(am + gm)) gm = -gm;
    a = am;
    b = gm;
  }
  return kPi / (2.0 * a);
}

namespace {
cplx nome(cplx tau) {
  if (!(tau.imag() > 0.0)) throw std::domain_error("theta: Im tau must be positive");
  return std::exp(cplx(0.0, kPi) * tau);
}
}  // namespace

cplx theta2_null(cplx tau) {
  cplx q = nome(tau);
  cplx q2 = q * q;
  cplx sum = 0.0;
  cplx term = std::pow(q, cplx(0.25));  // q^{(n+1/2)^2} at n = 0
  for (int n = 0; n < 200; ++n) {
    sum += term;
    if (std::abs(term) < 1e-16 * std::max(1.0, std::abs(sum))) break;
    // ratio q^{(n+3/2)^2 - (n+1/2)^2} = q^{2n+2}
    term *= std::pow(q2, static_cast<double>(n + 1));
  }
  return 2.0 * sum;
}

cplx theta3_null(cplx tau) {
  cplx q = nome(tau);
  cplx sum = 1.0, qn = 1.0;
  for (int n = 1; n < 200; ++n) {
    qn *= std::pow(q, 2.0 * n - 1.0);  // q^{n^2}
    sum += 2.0 * qn;
    if (std::abs(qn) < 1e-16 * std::abs(sum)) break;
  }
  return sum;
}

cplx theta4_null(cplx tau) {
  cplx q = nome(tau);
  cplx sum = 1.0, qn = 1.0;
  double sgn = -1.0;
  for (int n = 1; n < 200; ++n) {
    qn *= std::pow(q, 2.0 * n - 1.0);
    sum += 2.0 * sgn * qn;
    if (std::abs(qn) < 1e-16 * std::abs(sum)) break;
    sgn = -sgn;
  }
  return sum;
}

cplx modular_lambda(cplx tau) {
  cplx r = theta2_null(tau) / theta3_null(tau);
  cplx r2 = r * r;
  return r2 * r2;
}

cplx modular_lambda_derivative(cplx tau) {
  cplx l = modular_lambda(tau);
  cplx t3 = theta3_null(tau);
  cplx t34 = t3 * t3 * t3 * t3;
  return cplx(0.0, kPi) * l * (cplx(1.0) - l) * t34;
}

cplx inverse_modular_lambda(cplx l) {
  if (std::abs(l) < 1e-14 || std::abs(l - cplx(1.0)) < 1e-14)
    throw std::domain_error("inverse_modular_lambda: l in {0,1} is parabolic");
  cplx tau;
  if (l.imag() == 0.0 && l.real() < 0.0) {
    // the principal K(sqrt(1-l)) hits the cut; route through
    // lambda(tau + 1) = lambda / (lambda - 1), which maps l to (0,1)
    cplx l1 = l / (l - 1.0);
    tau = cplx(0.0, 1.0) * elliptic_K(std::sqrt(cplx(1.0) - l1)) /
              elliptic_K(std::sqrt(l1)) -
          1.0;
  } else if (l.imag() == 0.0 && l.real() > 1.0) {
    // lambda(-1/tau) = 1 - lambda maps l > 1 to 1 - l < 0
    cplx l2 = (cplx(1.0) - l) / (-l);  // (1-l)/(1-l-1): the l<0 route for 1-l
    cplx tau1 = cplx(0.0, 1.0) * elliptic_K(std::sqrt(cplx(1.0) - l2)) /
                    elliptic_K(std::sqrt(l2)) -
                1.0;
    tau = -1.0 / tau1;
  } else {
    tau = cplx(0.0, 1.0) * elliptic_K(std::sqrt(cplx(1.0) - l)) /
          elliptic_K(std::sqrt(l));
  }
  if (!(tau.imag() > 0.0)) tau = cplx(tau.real(), std::abs(tau.imag()) + 1e-12);
  double target = 1e-12 * std::max(1.0, std::abs(l));
  for (int it = 0; it < 60; ++it) {
    cplx f = modular_lambda(tau) - l;
    if (std::abs(f) <= target) return tau;
    cplx d = modular_lambda_derivative(tau);
    if (d == cplx(0.0)) break;
    cplx step = f / d;
    // keep Newton in the upper half plane
    cplx trial = tau - step;
    int halvings = 0;
    while (!(trial.imag() > 0.0) && halvings < 50) {
      step *= 0.5;
      trial = tau - step;
      ++halvings;
    }
    tau = trial;
  }
  if (std::abs(modular_lambda(tau) - l) <= target) return tau;
  throw std::runtime_error("inverse_modular_lambda: Newton did not converge");
}

const std::vector<std::array<long, 4>>& gamma2_matrices() {
  static const std::vector<std::array<long, 4>> mats = [] {
    // BFS over the generators tau -> tau + 2 and tau -> tau / (2 tau + 1).
    const std::array<std::array<long, 4>, 4> gens = {{
        {{1, 2, 0, 1}},
        {{1, -2, 0, 1}},
        {{1, 0, 2, 1}},
        {{1, 0, -2, 1}},
    }};
    auto mul = [](const std::array<long, 4>& a, const std::array<long, 4>& b) {
      return std::array<long, 4>{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                                 a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
    };
    auto canon = [](std::array<long, 4> m) {
      // -M acts identically; fix the sign deterministically
      if (m[0] < 0 || (m[0] == 0 && m[2] < 0)) {
        for (auto& v : m) v = -v;
      }
      return m;
    };
    std::vector<std::array<long, 4>> out;
    std::set<std::array<long, 4>> seen;
    std::vector<std::array<long, 4>> frontier = {{{1, 0, 0, 1}}};
    seen.insert(frontier[0]);
    out.push_back(frontier[0]);
    const long bound = 64;
    for (int depth = 0; depth < 7; ++depth) {
      std::vector<std::array<long, 4>> next;
      for (const auto& m : frontier) {
        for (const auto& g : gens) {
          auto p = canon(mul(g, m));
          if (std::max({std::abs(p[0]), std::abs(p[1]), std::abs(p[2]),
                        std::abs(p[3])}) > bound)
            continue;
          if (seen.insert(p).second) {
            out.push_back(p);
            next.push_back(p);
          }
        }
      }
      frontier = std::move(next);
    }
    return out;
  }();
  return mats;
}

cplx gamma2_apply(const std::array<long, 4>& m, cplx tau) {
  return (static_cast<double>(m[0]) * tau + static_cast<double>(m[1])) /
         (static_cast<double>(m[2]) * tau + static_cast<double>(m[3]));
}

cplx gamma2_nearest(cplx tau, cplx target) {
  cplx best = tau;
  double bd = std::abs(tau - target);
  for (const auto& m : gamma2_matrices()) {
    cplx im = gamma2_apply(m, tau);
    double d = std::abs(im - target);
    if (d < bd) {
      bd = d;
      best = im;
    }
  }
  return best;
}

}  // namespace hitchin
