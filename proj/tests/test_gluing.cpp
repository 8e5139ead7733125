#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "hitchin/gluing.hpp"
#include "hitchin/specfun.hpp"

using namespace hitchin;

namespace {

PoleDatum make_pole(PoleLocation loc, int order, PoleKind kind, std::vector<cplx> mu) {
  PoleDatum p;
  p.location = loc;
  p.order = order;
  p.kind = kind;
  p.mu = std::move(mu);
  return p;
}

BasePoint u4_base(double t) {
  IrregularDivisor d;
  d.poles = {make_pole(PoleLocation::at(0.0), 4, PoleKind::untwisted,
                       {cplx(0.0), cplx(0.0), cplx(0.0), cplx(-1.0)})};
  return build_base_point(d, {cplx(1.0)}, {t});
}

const FiducialProfile& psi1() {
  static const FiducialProfile p =
      solve_psi1(kDefaultRhoMin, kDefaultRhoMax, kDefaultProfilePoints);
  return p;
}

// Richardson 5-point first and second derivatives
double fd1(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}
double fd2(const std::function<double(double)>& f, double x, double h) {
  return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) /
         (12 * h * h);
}

}  // namespace

TEST_CASE("cutoff: plateaus, monotonicity, derivative consistency") {
  CHECK(cutoff_chi(0.25).chi == 1.0);
  CHECK(cutoff_chi(0.25).dchi == 0.0);
  CHECK(cutoff_chi(0.5).chi == 1.0);
  CHECK(cutoff_chi(1.5).chi == 0.0);
  CHECK(cutoff_chi(1.0).chi == 0.0);
  auto mid = cutoff_chi(0.75);
  CHECK(mid.chi > 0.0);
  CHECK(mid.chi < 1.0);
  CHECK(mid.dchi < 0.0);

  auto chi = [](double s) { return cutoff_chi(s).chi; };
  for (double s : {0.55, 0.6, 0.75, 0.9, 0.97}) {
    auto v = cutoff_chi(s);
    CHECK(std::abs(fd1(chi, s, 1e-5) - v.dchi) < 1e-6);
    CHECK(std::abs(fd2(chi, s, 1e-4) - v.d2chi) < 1e-5);
  }
  // nonincreasing everywhere
  double prev = 1.0;
  for (int k = 0; k <= 200; ++k) {
    double v = chi(1.5 * k / 200.0);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("approximate metric entries: limits and determinants") {
  const auto& p = psi1();
  double lambda = 4.0, scale = 0.5;
  // chi = 0 region: the limiting metric entries
  double r0 = 0.6;  // r/scale = 1.2 > 1
  auto [a, b] = approx_metric_entries(p, lambda, r0, DiskKind::moving_zero, scale);
  CHECK(a == doctest::Approx(std::sqrt(r0)).epsilon(1e-14));
  CHECK(b == doctest::Approx(1.0 / std::sqrt(r0)).epsilon(1e-14));
  // unimodularity for moving zeros
  for (double r : {0.1, 0.2, 0.3, 0.45}) {
    auto [h11, h22] = approx_metric_entries(p, lambda, r, DiskKind::moving_zero, scale);
    CHECK(h11 * h22 == doctest::Approx(1.0).epsilon(1e-13));
  }
  // tame product r^2
  FiducialProfile p2 = solve_psi2(0.3, 1e-4, 20.0, 2000);
  for (double r : {0.1, 0.2, 0.3, 0.45}) {
    auto [h11, h22] = approx_metric_entries(p2, lambda, r, DiskKind::tame, scale);
    CHECK(h11 * h22 == doctest::Approx(r * r).epsilon(1e-13));
  }
}

TEST_CASE("residual vanishes identically off the cutoff annulus") {
  const auto& p = psi1();
  double t = 1e3, kappa = 0.3;
  int j = 4;
  double lambda = 2.0 * std::pow(t, 9.0 / 8.0);
  double R = kappa * std::pow(t, -0.25);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    double r = U(rng) < 0.5 ? R / 2.0 * (0.02 + 0.97 * U(rng))  // chi == 1 plateau
                            : R * (1.0 + 3.0 * U(rng));         // chi == 0 outside
    double E = residual_profile(p, lambda, t, j, kappa, DiskKind::moving_zero, r);
    CHECK(E == 0.0);
  }
  CHECK_THROWS_AS(residual_profile(p, lambda, t, j, kappa, DiskKind::moving_zero, -0.1),
                  std::domain_error);
}

TEST_CASE("residual matches the numeric-differentiation oracle mid-annulus") {
  // Work where the profile argument lands in the analytic K0/pi tail so the
  // finite differences see a smooth function.
  const auto& p = psi1();
  double t = 200.0, kappa = 0.3;
  int j = 4;
  double lambda = 2.0 * std::pow(t, 9.0 / 8.0);
  double R = kappa * std::pow(t, -0.25);
  auto lchi = [&](double r) {
    double arg = 8.0 * lambda * std::pow(r, 1.5) / 3.0;
    return p.eval_psi(arg) * cutoff_chi(r / R).chi;
  };
  for (double frac : {0.62, 0.7, 0.8, 0.88}) {
    double r = R * frac;
    double h = r * 2e-4;
    double lap = fd2(lchi, r, h) + fd1(lchi, r, h) / r;
    double oracle = -0.25 * lap + 2.0 * lambda * lambda * r * std::sinh(2.0 * lchi(r));
    double lib = residual_profile(p, lambda, t, j, kappa, DiskKind::moving_zero, r);
    CHECK(lib == doctest::Approx(oracle).epsilon(1e-6));
  }
  // tame variant, same oracle structure with 1/r weight and fixed annulus
  FiducialProfile p2 = solve_psi2(0.3, 1e-4, 20.0, 4000);
  double lam2 = 40.0;
  auto mchi = [&](double r) {
    double arg = 8.0 * lam2 * std::sqrt(r);
    return p2.eval_psi(arg) * cutoff_chi(r / kappa).chi;
  };
  for (double frac : {0.62, 0.75, 0.9}) {
    double r = kappa * frac;
    double h = r * 2e-4;
    double lap = fd2(mchi, r, h) + fd1(mchi, r, h) / r;
    double oracle = -0.25 * lap + 2.0 * lam2 * lam2 / r * std::sinh(2.0 * mchi(r));
    double lib = residual_profile(p2, lam2, t, 1, kappa, DiskKind::tame, r);
    CHECK(lib == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("residual L2 norm: monotone decay on the order-four family") {
  ProfileSet profiles;
  profiles.psi1 = psi1();
  double prev = 1e300;
  for (double t : {200.0, 400.0, 800.0, 1600.0}) {
    ResidualReport rep = residual_l2_norm(u4_base(t), t, profiles);
    REQUIRE(rep.disks.size() == 4);
    CHECK(rep.log_total < prev);
    prev = rep.log_total;
    CHECK(rep.sigma.num == 3);
    CHECK(rep.sigma.den == 4);
    // disjoint supports: total^2 = sum of per-disk squares
    double sum = 0.0;
    for (const auto& disk : rep.disks) sum += std::exp(2.0 * (disk.log_l2 - rep.log_total));
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("residual L2 norm: deep-tail regime reports log norms") {
  ProfileSet profiles;
  profiles.psi1 = psi1();
  double t = 1e6;
  ResidualReport rep = residual_l2_norm(u4_base(t), t, profiles);
  CHECK(rep.total() == 0.0);       // underflows as a plain double
  CHECK(rep.log_total < -5000.0);  // but the log is meaningful
  CHECK(rep.log_total > -1e7);
  std::string js = rep.to_json();
  CHECK(js.find("log_total") != std::string::npos);
}

TEST_CASE("residual norm is invariant under the rescaled-coordinate evaluation") {
  // change of variables u = r / (kappa t^{-1/j}): 2 pi int |E|^2 r dr computed
  // in both parameterizations must agree
  const auto& p = psi1();
  double t = 300.0, kappa = 0.3;
  int j = 4;
  double lambda = 2.0 * std::pow(t, 9.0 / 8.0);
  double R = kappa * std::pow(t, -0.25);
  auto E = [&](double r) {
    return residual_profile_scaled(p, lambda, t, j, kappa, DiskKind::moving_zero, r);
  };
  auto val = [&](double r) {
    double m = E(r).value();
    return m * m * r;
  };
  auto val_scaled = [&](double u) {
    double r = R * u;
    double m = E(r).value();
    return m * m * r * R;  // |E(R u)|^2 (R u) R du
  };
  int n = 4000;
  double s1 = 0, s2 = 0;
  for (int k = 0; k <= n; ++k) {
    double w = (k == 0 || k == n) ? 0.5 : 1.0;
    double r = R / 2 + (R - R / 2) * k / n;
    double u = 0.5 + 0.5 * k / n;
    s1 += w * val(r) * (R / 2) / n;
    s2 += w * val_scaled(u) * 0.5 / n;
  }
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-8));
}

TEST_CASE("residual disks for mixed twisted/tame configurations") {
  // two twisted order-two poles: two moving disks, centers contribute nothing
  IrregularDivisor d;
  d.poles = {make_pole(PoleLocation::at(0.0), 2, PoleKind::twisted,
                       {cplx(-1.0), cplx(0.0)}),
             make_pole(PoleLocation::infinity(), 2, PoleKind::twisted,
                       {cplx(1.0), cplx(0.0)})};
  auto b = build_base_point(d, {cplx(1.0)}, {400.0});
  ProfileSet profiles = make_profiles(d, 1e-5, 20.0, 2000);
  CHECK(profiles.psi2_by_pole.empty());
  ResidualReport rep = residual_l2_norm(b, 400.0, profiles);
  REQUIRE(rep.disks.size() == 2);
  for (const auto& disk : rep.disks) {
    CHECK(disk.cls == RootClass::moving_zero);
    CHECK(disk.cluster_exponent == 1);
    CHECK(std::isfinite(disk.log_l2));
  }
  CHECK(rep.disks[0].chart == Chart::z);
  CHECK(rep.disks[1].chart == Chart::w);
  // the norms decay in t
  ResidualReport rep_big = residual_l2_norm(
      build_base_point(d, {cplx(1.0)}, {1600.0}), 1600.0, profiles);
  CHECK(rep_big.log_total < rep.log_total);

  // simple poles at 0 and 1 plus untwisted order-two pole at infinity:
  // two tame disks (fixed annuli) and two moving disks in the w chart
  IrregularDivisor d2;
  d2.poles = {make_pole(PoleLocation::at(0.0), 1, PoleKind::tame, {}),
              make_pole(PoleLocation::at(1.0), 1, PoleKind::tame, {}),
              make_pole(PoleLocation::infinity(), 2, PoleKind::untwisted,
                        {cplx(0.0), cplx(-1.0)})};
  auto b2 = build_base_point(d2, {cplx(1.0)}, {400.0});
  ProfileSet profiles2 = make_profiles(d2, 1e-5, 20.0, 2000);
  CHECK(profiles2.psi2_by_pole.size() == 2);
  ResidualReport rep2 = residual_l2_norm(b2, 400.0, profiles2);
  int tame = 0, moving = 0;
  for (const auto& disk : rep2.disks) {
    if (disk.cls == RootClass::tame_center) {
      ++tame;
      CHECK(disk.cluster_exponent == 0);
    } else {
      ++moving;
      CHECK(disk.chart == Chart::w);
      CHECK(disk.cluster_exponent == 2);
    }
    CHECK(std::isfinite(disk.log_l2));
  }
  CHECK(tame == 2);
  CHECK(moving == 2);
}

TEST_CASE("decay_fit: synthetic data recovered exactly") {
  std::vector<std::pair<double, double>> samples;
  for (double t : {100.0, 200.0, 400.0, 800.0, 1600.0})
    samples.push_back({t, std::log(3.0) - 2.0 * std::pow(t, 0.75)});
  DecayFit fit = decay_fit(samples, 0.75);
  CHECK(fit.c == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.cprime == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  // wrong exponent: visibly worse fit
  DecayFit wrong = decay_fit(samples, 0.25);
  CHECK(wrong.r_squared < 0.995);

  FreeDecayFit free_fit = decay_fit_free_sigma(samples);
  CHECK(free_fit.sigma == doctest::Approx(0.75).epsilon(1e-4));

  CHECK_THROWS_AS(decay_fit({{1.0, 0.0}, {2.0, -1.0}}, 0.5), std::invalid_argument);
}

TEST_CASE("decay table CSV format") {
  std::string csv = decay_table_csv({{100.0, -3.5}, {200.0, -6.0}});
  CHECK(csv.find("t,log_total_norm\n") == 0);
  CHECK(csv.find("100,-3.5\n") != std::string::npos);
}

TEST_CASE("w-chart moving-zero mass matches the direct limit oracle") {
  // pole layout with a finite pole away from the unit circle plus a twisted
  // pole at infinity: the cluster near infinity lives in the w chart and its
  // mass is |nu_w / (w - w0)|^{1/2} at the root
  IrregularDivisor d;
  d.poles = {make_pole(PoleLocation::at(0.0), 2, PoleKind::untwisted,
                       {cplx(0.0), cplx(-1.0)}),
             make_pole(PoleLocation::at(3.0), 1, PoleKind::tame, {}),
             make_pole(PoleLocation::infinity(), 2, PoleKind::twisted,
                       {cplx(1.0), cplx(0.0)})};
  double t = 500.0;
  auto b = build_base_point(d, {cplx(0.0), cplx(1.0)}, {1.0, t});
  ProfileSet profiles = make_profiles(d, 1e-5, 20.0, 2000);
  ResidualReport rep = residual_l2_norm(b, t, profiles);
  bool found = false;
  for (const auto& disk : rep.disks) {
    if (disk.chart != Chart::w || disk.cls != RootClass::moving_zero) continue;
    found = true;
    // direct limit of nu_w / (w - w0): nu_w(w) = nu_z(1/w) / w^4
    cplx w0 = disk.root;
    auto nu_w = [&](cplx w) { return eval_nu(b, 1.0 / w) / (w * w * w * w); };
    cplx f1 = nu_w(w0 + 1e-6) / cplx(1e-6);
    cplx f2 = nu_w(w0 + 1e-7) / cplx(1e-7);
    cplx limit = (10.0 * f2 - f1) / 9.0;
    CHECK(disk.lambda == doctest::Approx(std::sqrt(std::abs(limit))).epsilon(1e-4));
  }
  CHECK(found);
}

TEST_CASE("free-sigma residual fit recovers the divisor exponent") {
  ProfileSet profiles;
  profiles.psi1 = psi1();
  std::vector<std::pair<double, double>> samples;
  for (double t : {200.0, 421.7, 889.1, 1874.4, 3951.3, 8329.9}) {
    ResidualReport rep = residual_l2_norm(u4_base(t), t, profiles);
    samples.push_back({t, rep.log_total});
  }
  FreeDecayFit ff = decay_fit_free_sigma(samples);
  CHECK(std::abs(ff.sigma - 0.75) <= 0.1 * 0.75);
}
