#include "hitchin/painleve.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hitchin/specfun.hpp"

namespace hitchin {

namespace {

constexpr double kPi = std::numbers::pi;

// Right-hand side of the log-coordinate form psi_ss = g(s, psi),
// g = (e^{2s}/2) sinh(2 psi); s = log rho turns the radial Laplacian into a
// plain second derivative and clusters the grid toward rho = 0.
double rhs(double s, double psi) { return 0.5 * std::exp(2.0 * s) * std::sinh(2.0 * psi); }
double rhs_dpsi(double s, double psi) { return std::exp(2.0 * s) * std::cosh(2.0 * psi); }

struct Discretization {
  double s0, h;
  int n;
  double robin_a;       // psi_s at s0
  double dirichlet;     // psi at s_{n-1}
  double s(int i) const { return s0 + h * i; }
};

// F(psi) = 0 for the Numerov interior rows, a 4th-order one-sided Robin row
// at the left end, and the Dirichlet row at the right end.
Eigen::VectorXd residual_vector(const Discretization& d, const Eigen::VectorXd& psi) {
  Eigen::VectorXd F(d.n);
  F(0) = (-25.0 * psi(0) + 48.0 * psi(1) - 36.0 * psi(2) + 16.0 * psi(3) -
          3.0 * psi(4)) /
             (12.0 * d.h) -
         d.robin_a;
  for (int i = 1; i + 1 < d.n; ++i) {
    double gm = rhs(d.s(i - 1), psi(i - 1));
    double g0 = rhs(d.s(i), psi(i));
    double gp = rhs(d.s(i + 1), psi(i + 1));
    F(i) = (psi(i - 1) - 2.0 * psi(i) + psi(i + 1)) / (d.h * d.h) -
           (gm + 10.0 * g0 + gp) / 12.0;
  }
  F(d.n - 1) = psi(d.n - 1) - d.dirichlet;
  return F;
}

Eigen::SparseMatrix<double> jacobian(const Discretization& d, const Eigen::VectorXd& psi) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * d.n + 8);
  const double invh = 1.0 / (12.0 * d.h);
  trip.emplace_back(0, 0, -25.0 * invh);
  trip.emplace_back(0, 1, 48.0 * invh);
  trip.emplace_back(0, 2, -36.0 * invh);
  trip.emplace_back(0, 3, 16.0 * invh);
  trip.emplace_back(0, 4, -3.0 * invh);
  const double ih2 = 1.0 / (d.h * d.h);
  for (int i = 1; i + 1 < d.n; ++i) {
    trip.emplace_back(i, i - 1, ih2 - rhs_dpsi(d.s(i - 1), psi(i - 1)) / 12.0);
    trip.emplace_back(i, i, -2.0 * ih2 - 10.0 * rhs_dpsi(d.s(i), psi(i)) / 12.0);
    trip.emplace_back(i, i + 1, ih2 - rhs_dpsi(d.s(i + 1), psi(i + 1)) / 12.0);
  }
  trip.emplace_back(d.n - 1, d.n - 1, 1.0);
  Eigen::SparseMatrix<double> J(d.n, d.n);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

// 4th-order first derivative on the uniform grid.
std::vector<double> grid_derivative(const Eigen::VectorXd& psi, double h) {
  const int n = static_cast<int>(psi.size());
  std::vector<double> d(n);
  auto at = [&](int i) { return psi(i); };
  d[0] = (-25 * at(0) + 48 * at(1) - 36 * at(2) + 16 * at(3) - 3 * at(4)) / (12 * h);
  d[1] = (-3 * at(0) - 10 * at(1) + 18 * at(2) - 6 * at(3) + at(4)) / (12 * h);
  for (int i = 2; i + 2 < n; ++i)
    d[i] = (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * h);
  d[n - 2] = (3 * at(n - 1) + 10 * at(n - 2) - 18 * at(n - 3) + 6 * at(n - 4) -
              at(n - 5)) /
             (12 * h);
  d[n - 1] =
      (25 * at(n - 1) - 48 * at(n - 2) + 36 * at(n - 3) - 16 * at(n - 4) +
       3 * at(n - 5)) /
      (12 * h);
  return d;
}

// Quintic Hermite on [0,1] from endpoint (value, first, second) data; returns
// the second derivative of the interpolant at x, scaled back by 1/L^2 outside.
double quintic_second_derivative(double x, double f0, double d0, double c0, double f1,
                                 double d1, double c1, double L) {
  // coefficients of f(x) = a0 + a1 x + ... + a5 x^5 on the unit interval,
  // with d = L f', c = L^2 f'' endpoint data
  double D0 = d0 * L, C0 = c0 * L * L, D1 = d1 * L, C1 = c1 * L * L;
  double a0 = f0, a1 = D0, a2 = C0 / 2.0;
  double r0 = f1 - (a0 + a1 + a2);
  double r1 = D1 - (a1 + 2 * a2);
  double r2 = C1 - 2 * a2;
  double a3 = 10 * r0 - 4 * r1 + r2 / 2.0;
  double a4 = -15 * r0 + 7 * r1 - r2;
  double a5 = 6 * r0 - 3 * r1 + r2 / 2.0;
  double second = 2 * a2 + 6 * a3 * x + 12 * a4 * x * x + 20 * a5 * x * x * x;
  return second / (L * L);
}

double quintic_value(double x, double f0, double d0, double c0, double f1, double d1,
                     double c1, double L) {
  double D0 = d0 * L, C0 = c0 * L * L, D1 = d1 * L, C1 = c1 * L * L;
  double a0 = f0, a1 = D0, a2 = C0 / 2.0;
  double r0 = f1 - (a0 + a1 + a2);
  double r1 = D1 - (a1 + 2 * a2);
  double r2 = C1 - 2 * a2;
  double a3 = 10 * r0 - 4 * r1 + r2 / 2.0;
  double a4 = -15 * r0 + 7 * r1 - r2;
  double a5 = 6 * r0 - 3 * r1 + r2 / 2.0;
  return a0 + x * (a1 + x * (a2 + x * (a3 + x * (a4 + x * a5))));
}

FiducialProfile solve_profile(ProfileKind kind, double alpha1, double robin_a,
                              double rho_min, double rho_max, int n_points,
                              const SolveOptions& opts) {
  if (!(rho_min > 0.0 && rho_min < 1.0 && rho_max > 1.0))
    throw std::invalid_argument("solve: need 0 < rho_min < 1 < rho_max");
  if (n_points < 200) throw std::invalid_argument("solve: n_points must be >= 200");

  Discretization d;
  d.n = n_points;
  d.s0 = std::log(rho_min);
  d.h = (std::log(rho_max) - d.s0) / (n_points - 1);
  d.robin_a = robin_a;
  d.dirichlet = bessel_k0(rho_max) / kPi;

  // initial guess: small-rho log law left of rho = 1, Bessel tail right of it
  Eigen::VectorXd psi(d.n);
  for (int i = 0; i < d.n; ++i) {
    double s = d.s(i);
    psi(i) = robin_a * std::min(s, 0.0) + bessel_k0(std::exp(std::max(s, 0.0))) / kPi;
  }

  std::ostringstream trace;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  double fnorm = residual_vector(d, psi).lpNorm<Eigen::Infinity>();
  bool converged = false;
  for (int it = 0; it < opts.max_newton_iterations; ++it) {
    // the 1/h^2-scaled rows have a rounding floor; converging below it is
    // not possible in double precision
    double floor_est = 64.0 * std::numeric_limits<double>::epsilon() *
                       (psi.lpNorm<Eigen::Infinity>() + 1.0) / (d.h * d.h);
    double target = std::max(opts.newton_tolerance, floor_est);
    if (fnorm <= target) {
      converged = true;
      break;
    }
    Eigen::VectorXd F = residual_vector(d, psi);
    lu.compute(jacobian(d, psi));
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("solve: singular Jacobian in Newton iteration");
    Eigen::VectorXd step = lu.solve(-F);
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      Eigen::VectorXd trial = psi + lambda * step;
      double tnorm = residual_vector(d, trial).lpNorm<Eigen::Infinity>();
      if (tnorm < fnorm || tnorm <= target) {
        psi = trial;
        fnorm = tnorm;
        accepted = true;
        trace << "it " << it << ": damping " << lambda << ", |F| " << fnorm << "\n";
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (fnorm <= 10.0 * target) {  // parked at the rounding floor
        converged = true;
        break;
      }
      throw std::runtime_error("solve: Newton line search stalled; damping trace:\n" +
                               trace.str());
    }
  }
  if (!converged)
    throw std::runtime_error("solve: Newton did not reach tolerance; damping trace:\n" +
                             trace.str());

  FiducialProfile p;
  p.kind = kind;
  p.alpha1 = alpha1;
  p.robin_coefficient = robin_a;
  p.rho.resize(d.n);
  p.psi.resize(d.n);
  p.dpsi.resize(d.n);
  std::vector<double> psis = grid_derivative(psi, d.h);
  for (int i = 0; i < d.n; ++i) {
    p.rho[i] = std::exp(d.s(i));
    p.psi[i] = psi(i);
    p.dpsi[i] = psis[i] / p.rho[i];  // psi_s = rho psi'
  }
  p.small_rho_constant = p.psi.front() - robin_a * std::log(p.rho.front());

  // certify: defect of the quintic reconstruction against psi_ss = g(s, psi),
  // sampled off the nodes
  double worst = 0.0;
  for (int i = 0; i + 1 < d.n; ++i) {
    double sL = d.s(i), sR = d.s(i + 1);
    double cL = rhs(sL, psi(i)), cR = rhs(sR, psi(i + 1));
    for (double x : {0.2, 0.5, 0.8}) {
      double sx = sL + x * d.h;
      double val = quintic_value(x, psi(i), psis[i], cL, psi(i + 1), psis[i + 1], cR, d.h);
      double second =
          quintic_second_derivative(x, psi(i), psis[i], cL, psi(i + 1), psis[i + 1], cR, d.h);
      worst = std::max(worst, std::abs(second - rhs(sx, val)));
    }
  }
  p.certified_residual = worst;

  // boundary sanity
  if (std::abs(p.psi.back() - d.dirichlet) > 1e-12 * std::max(1.0, std::abs(d.dirichlet)))
    throw std::runtime_error("solve: outer boundary value mismatch");
  return p;
}

}  // namespace

FiducialProfile solve_psi1(double rho_min, double rho_max, int n_points,
                           const SolveOptions& opts) {
  return solve_profile(ProfileKind::psi1, 0.25, -1.0 / 3.0, rho_min, rho_max, n_points,
                       opts);
}

FiducialProfile solve_psi2(double alpha1, double rho_min, double rho_max, int n_points,
                           const SolveOptions& opts) {
  if (!(alpha1 > 0.0 && alpha1 < 0.5))
    throw std::invalid_argument("solve_psi2: alpha1 must lie in (0, 1/2)");
  double a0 = 1.0 + 2.0 * alpha1 - 2.0 * (1.0 - alpha1);  // 4 alpha1 - 1
  return solve_profile(ProfileKind::psi2, alpha1, a0, rho_min, rho_max, n_points, opts);
}

namespace {

// cubic Hermite in s = log rho between grid nodes
double hermite(double x, double f0, double d0, double f1, double d1, double L,
               bool derivative) {
  double D0 = d0 * L, D1 = d1 * L;
  double h00 = 2 * x * x * x - 3 * x * x + 1;
  double h10 = x * x * x - 2 * x * x + x;
  double h01 = -2 * x * x * x + 3 * x * x;
  double h11 = x * x * x - x * x;
  if (!derivative) return h00 * f0 + h10 * D0 + h01 * f1 + h11 * D1;
  double g00 = 6 * x * x - 6 * x;
  double g10 = 3 * x * x - 4 * x + 1;
  double g01 = -6 * x * x + 6 * x;
  double g11 = 3 * x * x - 2 * x;
  return (g00 * f0 + g10 * D0 + g01 * f1 + g11 * D1) / L;
}

}  // namespace

double FiducialProfile::eval_psi(double r) const {
  ScaledValue v = eval_psi_scaled(r);
  return v.value();
}

double FiducialProfile::eval_dpsi(double r) const {
  ScaledValue v = eval_dpsi_scaled(r);
  return v.value();
}

ScaledValue FiducialProfile::eval_psi_scaled(double r) const {
  if (r < rho.front() * (1.0 - 1e-12))
    throw std::domain_error("FiducialProfile: argument below rho_min");
  if (r > rho.back()) {
    ScaledValue v;
    v.log_scale = log_bessel_k0(r) - std::log(kPi);
    v.mantissa = 1.0;
    return v;
  }
  double s = std::log(std::max(r, rho.front()));
  double s0 = std::log(rho.front());
  double h = (std::log(rho.back()) - s0) / (rho.size() - 1);
  int i = std::min<int>(static_cast<int>((s - s0) / h), static_cast<int>(rho.size()) - 2);
  double x = (s - (s0 + i * h)) / h;
  // node psi_s = rho psi'
  double d0 = dpsi[i] * rho[i], d1 = dpsi[i + 1] * rho[i + 1];
  ScaledValue v;
  v.mantissa = hermite(x, psi[i], d0, psi[i + 1], d1, h, false);
  return v;
}

ScaledValue FiducialProfile::eval_dpsi_scaled(double r) const {
  if (r < rho.front() * (1.0 - 1e-12))
    throw std::domain_error("FiducialProfile: argument below rho_min");
  if (r > rho.back()) {
    ScaledValue v;
    v.log_scale = log_bessel_k0(r) - std::log(kPi);
    v.mantissa = -bessel_k1_over_k0(r);  // psi' = K0'/pi = -K1/pi
    return v;
  }
  double s = std::log(std::max(r, rho.front()));
  double s0 = std::log(rho.front());
  double h = (std::log(rho.back()) - s0) / (rho.size() - 1);
  int i = std::min<int>(static_cast<int>((s - s0) / h), static_cast<int>(rho.size()) - 2);
  double x = (s - (s0 + i * h)) / h;
  double d0 = dpsi[i] * rho[i], d1 = dpsi[i + 1] * rho[i + 1];
  ScaledValue v;
  v.mantissa = hermite(x, psi[i], d0, psi[i + 1], d1, h, true) / r;  // psi' = psi_s / rho
  return v;
}

std::string FiducialProfile::to_csv() const {
  std::ostringstream os;
  os << "# {\"kind\":\"" << (kind == ProfileKind::psi1 ? "psi1" : "psi2")
     << "\",\"alpha1\":" << alpha1 << ",\"certified_residual\":" << certified_residual
     << ",\"small_rho_constant\":" << small_rho_constant << "}\n";
  os << "rho,psi,dpsi\n";
  char buf[128];
  for (size_t i = 0; i < rho.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", rho[i], psi[i], dpsi[i]);
    os << buf;
  }
  return os.str();
}

double fiducial_argument(ProfileArgument kind, double lambda, double r) {
  return kind == ProfileArgument::moving_zero
             ? 8.0 * lambda * std::pow(r, 1.5) / 3.0
             : 8.0 * lambda * std::sqrt(r);
}

double eval_fiducial(const FiducialProfile& profile, double lambda, double r,
                     ProfileArgument exponent_kind) {
  return profile.eval_psi(fiducial_argument(exponent_kind, lambda, r));
}

}  // namespace hitchin
