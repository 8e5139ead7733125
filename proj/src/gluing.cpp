#include "hitchin/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace hitchin {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLogZero = -1e30;  // stand-in for log 0 in scaled arithmetic

double f_bump(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
}  // namespace

CutoffValue cutoff_chi(double s) {
  CutoffValue v;
  if (s <= 0.5) {
    v.chi = 1.0;
    return v;
  }
  if (s >= 1.0) return v;
  double ua = 2.0 - 2.0 * s, ub = 2.0 * s - 1.0;
  double A = f_bump(ua), B = f_bump(ub);
  double A1 = -2.0 * A / (ua * ua);
  double B1 = 2.0 * B / (ub * ub);
  double A2 = 4.0 * A * (1.0 / (ua * ua * ua * ua) - 2.0 / (ua * ua * ua));
  double B2 = 4.0 * B * (1.0 / (ub * ub * ub * ub) - 2.0 / (ub * ub * ub));
  double S = A + B, S1 = A1 + B1;
  v.chi = A / S;
  v.dchi = (A1 * B - A * B1) / (S * S);
  v.d2chi = ((A2 * B - A * B2) * S - 2.0 * (A1 * B - A * B1) * S1) / (S * S * S);
  return v;
}

std::pair<double, double> approx_metric_entries(const FiducialProfile& profile,
                                                double lambda, double r, DiskKind kind,
                                                double cutoff_scale) {
  if (!(r > 0.0)) throw std::domain_error("approx_metric_entries: r must be positive");
  CutoffValue c = cutoff_chi(r / cutoff_scale);
  double arg = fiducial_argument(
      kind == DiskKind::moving_zero ? ProfileArgument::moving_zero : ProfileArgument::tame,
      lambda, r);
  double l = profile.eval_psi(arg);
  double e = std::exp(c.chi * l);
  if (kind == DiskKind::moving_zero) return {std::sqrt(r) * e, 1.0 / (std::sqrt(r) * e)};
  return {std::sqrt(r) * e, std::pow(r, 1.5) / e};
}

namespace {

// Regrouped error formula. With Delta l * chi replaced through the profile
// ODE, E = 2 lambda^2 w(r) [sinh(2 l chi) - chi sinh(2 l)]
//        - (1/4)[2 a l' chi' + a^2 l chi'' + a l chi' / r],
// where a = 1/cutoff_scale (times t^{1/j} for moving zeros), w = r for moving
// zeros and 1/r for tame disks. Exact zeros on both chi plateaus.
ScaledValue residual_impl(const FiducialProfile& profile, double lam2w, double a,
                          double r, double arg, double dchain) {
  ScaledValue out;
  double s = r * a;
  CutoffValue c = cutoff_chi(s);
  if (c.chi == 1.0 || c.chi == 0.0) {
    // plateau: sinh group cancels exactly, cutoff derivatives vanish
    out.mantissa = 0.0;
    out.log_scale = 0.0;
    return out;
  }
  ScaledValue l = profile.eval_psi_scaled(arg);
  ScaledValue lp = profile.eval_dpsi_scaled(arg);  // same log_scale as l by construction
  double ls = l.log_scale;
  double lm = l.mantissa;
  double lpm = lp.mantissa * dchain;  // d l / d r mantissa

  // sinh(2 l chi) - chi sinh(2 l), in units of exp(ls)
  double sinh_m;
  double l_log_mag = ls + std::log(std::max(std::abs(lm), 1e-300));
  if (l_log_mag > std::log(150.0)) {
    // overflow guard: chi sinh(2l) dominates; answer in log form
    ScaledValue big;
    big.log_scale = 2.0 * lm * std::exp(ls);
    big.mantissa = -c.chi * lam2w;
    return big;
  }
  if (l_log_mag > std::log(1e-4)) {
    double lv = lm * std::exp(ls);
    sinh_m = (std::sinh(2.0 * lv * c.chi) - c.chi * std::sinh(2.0 * lv)) * std::exp(-ls);
  } else {
    // odd series: sum_{k odd >= 3} (2l)^k / k! (chi^k - chi); two terms suffice
    double e2 = 2.0 * ls < -700.0 ? 0.0 : std::exp(2.0 * ls);
    double chi3 = c.chi * c.chi * c.chi;
    double chi5 = chi3 * c.chi * c.chi;
    double t3 = (8.0 / 6.0) * lm * lm * lm * (chi3 - c.chi) * e2;
    double t5 = (32.0 / 120.0) * lm * lm * lm * lm * lm * (chi5 - c.chi) * e2 * e2;
    sinh_m = t3 + t5;
  }

  double bracket = 2.0 * a * lpm * c.dchi + a * a * lm * c.d2chi + a * lm * c.dchi / r;
  out.mantissa = 2.0 * lam2w * sinh_m - 0.25 * bracket;
  out.log_scale = ls;
  return out;
}

}  // namespace

ScaledValue residual_profile_scaled(const FiducialProfile& profile, double lambda,
                                    double t, int jx, double kappa, DiskKind kind,
                                    double r) {
  if (!(r > 0.0)) throw std::domain_error("residual_profile: r must be positive");
  if (kind == DiskKind::moving_zero) {
    double a = std::pow(std::abs(t), 1.0 / jx) / kappa;
    double R = 1.0 / a;  // annulus outer radius
    if (r <= 0.5 * R || r >= R) return {0.0, 0.0};
    double arg = fiducial_argument(ProfileArgument::moving_zero, lambda, r);
    double dchain = 4.0 * lambda * std::sqrt(r);  // d(arg)/dr = 4 lambda sqrt(r)
    return residual_impl(profile, lambda * lambda * r, a, r, arg, dchain);
  }
  if (r <= 0.5 * kappa || r >= kappa) return {0.0, 0.0};
  double a = 1.0 / kappa;
  double arg = fiducial_argument(ProfileArgument::tame, lambda, r);
  double dchain = 4.0 * lambda / std::sqrt(r);
  return residual_impl(profile, lambda * lambda / r, a, r, arg, dchain);
}

double residual_profile(const FiducialProfile& profile, double lambda, double t, int jx,
                        double kappa, DiskKind kind, double r) {
  return residual_profile_scaled(profile, lambda, t, jx, kappa, kind, r).value();
}

ProfileSet make_profiles(const IrregularDivisor& divisor, double rho_min, double rho_max,
                         int n_points) {
  ProfileSet set;
  set.psi1 = solve_psi1(rho_min, rho_max, n_points);
  for (int i = 0; i < divisor.pole_count(); ++i) {
    const auto& p = divisor.poles[i];
    if (p.kind == PoleKind::tame)
      set.psi2_by_pole.emplace(i, solve_psi2(p.weight1, rho_min, rho_max, n_points));
  }
  return set;
}

namespace {

// Adaptive Simpson on [lo, hi] for a nonnegative integrand given as plain
// doubles (already rescaled); deterministic recursion order.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double tol, int depth, double flo, double fmid, double fhi) {
  double mid = 0.5 * (lo + hi);
  double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
  double flm = f(lmid), frm = f(rmid);
  double h = hi - lo;
  double whole = h / 6.0 * (flo + 4.0 * fmid + fhi);
  double left = h / 12.0 * (flo + 4.0 * flm + fmid);
  double right = h / 12.0 * (fmid + 4.0 * frm + fhi);
  double d = left + right - whole;
  if (depth <= 0 || std::abs(d) <= 15.0 * tol) return left + right + d / 15.0;
  return adaptive_simpson(f, lo, mid, tol / 2.0, depth - 1, flo, flm, fmid) +
         adaptive_simpson(f, mid, hi, tol / 2.0, depth - 1, fmid, frm, fhi);
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
  return adaptive_simpson(f, lo, hi, tol, 48, flo, fmid, fhi);
}

struct AnnulusNorm {
  double log_sup = kLogZero;
  double log_l2 = kLogZero;
};

// The integrand |E|^2 r concentrates in a boundary layer just above the inner
// edge once t is large (the profile decays like exp(-rho(r)) across the
// annulus), so the radial integral runs over panels geometric in r - lo with
// a per-panel magnitude reference; panels combine by log-sum-exp.
AnnulusNorm annulus_norm(const std::function<ScaledValue(double)>& E, double lo, double hi) {
  AnnulusNorm out;
  const double hw = hi - lo;
  std::vector<double> cuts = {0.0};
  for (double g = 1e-8; g < 1.0; g *= 2.0) cuts.push_back(g);
  cuts.push_back(1.0);

  auto log_mag = [&](double r) {
    ScaledValue v = E(r);
    if (v.mantissa == 0.0) return kLogZero;
    return v.log_scale + std::log(std::abs(v.mantissa));
  };

  double log_sum = kLogZero;  // log of sum_k J_k e^{2 ref_k}
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    double a = lo + hw * cuts[k], b = lo + hw * cuts[k + 1];
    double ref = kLogZero;
    for (int i = 0; i <= 8; ++i) {
      double lg = log_mag(a + (b - a) * i / 8.0);
      ref = std::max(ref, lg);
    }
    out.log_sup = std::max(out.log_sup, ref);
    if (ref <= kLogZero) continue;
    auto f = [&](double r) {
      double lg = log_mag(r);
      if (lg <= kLogZero) return 0.0;
      double w = 2.0 * (lg - ref);
      if (w < -700.0) return 0.0;
      if (w > 700.0) w = 700.0;  // probe grid missed a sharper peak; clamped
      return std::exp(w) * r;
    };
    double J = std::max(integrate(f, a, b, 1e-9 * hi * (b - a)), 0.0);
    if (J == 0.0) continue;
    double contrib = 2.0 * ref + std::log(J);
    if (log_sum <= kLogZero) log_sum = contrib;
    else {
      double big = std::max(log_sum, contrib), small = std::min(log_sum, contrib);
      log_sum = big + std::log1p(std::exp(small - big));
    }
  }
  if (log_sum > kLogZero) out.log_l2 = 0.5 * (std::log(2.0 * kPi) + log_sum);
  return out;
}

int cluster_exponent_for(const IrregularDivisor& d, int pole_index) {
  const auto& p = d.poles[pole_index];
  if (p.kind == PoleKind::tame)
    throw std::logic_error("cluster exponent requested for a tame pole");
  const int N = d.total_order();
  const int d0 = d.designated_pole();
  if (pole_index == d0)
    return p.kind == PoleKind::untwisted ? p.order + N - 4 : p.order + N - 5;
  return p.kind == PoleKind::untwisted ? p.order : p.order - 1;
}

}  // namespace

double ResidualReport::total() const {
  return log_total < -700.0 ? 0.0 : std::exp(log_total);
}

std::string ResidualReport::to_json() const {
  nlohmann::json disks_j = nlohmann::json::array();
  for (const auto& d : disks) {
    disks_j.push_back({{"root", {d.root.real(), d.root.imag()}},
                       {"chart", chart_name(d.chart)},
                       {"class", root_class_name(d.cls)},
                       {"cluster_exponent", d.cluster_exponent},
                       {"lambda", d.lambda},
                       {"log_sup_E", d.log_sup_E},
                       {"log_l2", d.log_l2}});
  }
  nlohmann::json j{{"t", t},
                   {"kappa", kappa},
                   {"sigma", {{"num", sigma.num}, {"den", sigma.den}}},
                   {"disks", disks_j},
                   {"log_total", log_total},
                   {"total", total()}};
  return j.dump(2);
}

ResidualReport residual_l2_norm(const BasePoint& base, double t,
                                const ProfileSet& profiles, double kappa) {
  ResidualReport rep;
  rep.t = t;
  rep.kappa = kappa;
  rep.sigma = compute_sigma(base.divisor);
  const auto& d = base.divisor;

  RamificationData ram = analyze_ramification(base, t);

  // chart-local root lists and pole factors for w-chart recomputation
  ComplexPolynomial tz = tilde_nu(base);
  ComplexPolynomial tw = tilde_nu_w_chart(base);
  std::vector<cplx> wroots;
  {
    ComplexPolynomial twn = tw.normalized(0.0);
    if (twn.degree() >= 1) wroots = find_roots(twn);
  }
  std::vector<std::pair<cplx, int>> w_pole_factors;
  double w_log_const = 0.0;  // nu_w carries (1 - x w)^{2m} = |x|^{2m} (w - 1/x)^{2m}
  for (const auto& p : d.poles) {
    if (p.location.at_infinity) {
      w_pole_factors.push_back({cplx(0.0), 2 * p.order});
    } else if (p.location.z != cplx(0.0)) {
      w_pole_factors.push_back({1.0 / p.location.z, 2 * p.order});
      w_log_const += p.order * std::log(std::abs(p.location.z));
    }
    // a z-pole at the origin has no finite w image
  }

  double sumsq_log = kLogZero;  // log of sum of squared norms
  for (const auto& r : ram.roots) {
    const auto& pole = d.poles[r.pole_index];
    DiskResidual disk;
    disk.cls = r.cls;

    if (r.cls == RootClass::twisted_center) continue;  // no cutoff there

    if (r.cls == RootClass::tame_center) {
      disk.root = r.value;
      disk.chart = r.chart;
      disk.cluster_exponent = 0;
      disk.lambda = r.local_mass;
      const FiducialProfile& prof = profiles.psi2_by_pole.at(r.pole_index);
      auto E = [&](double rr) {
        return residual_profile_scaled(prof, disk.lambda, t, 1, kappa, DiskKind::tame, rr);
      };
      AnnulusNorm n = annulus_norm(E, kappa / 2.0, kappa);
      disk.log_sup_E = n.log_sup;
      disk.log_l2 = n.log_l2;
      rep.disks.push_back(disk);
    } else {
      // moving zero: work in the chart owned by its pole cluster
      int j = cluster_exponent_for(d, r.pole_index);
      disk.cluster_exponent = j;
      if (!pole.location.at_infinity) {
        disk.root = r.value;
        disk.chart = Chart::z;
        disk.lambda = r.local_mass;
      } else {
        // mass in the w chart: lambda^2 = |nu_w / (w - w0)| at w0
        cplx w0 = 1.0 / r.value;
        size_t idx = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < wroots.size(); ++k) {
          double dd = std::abs(wroots[k] - w0);
          if (dd < best) {
            best = dd;
            idx = k;
          }
        }
        disk.root = wroots[idx];
        disk.chart = Chart::w;
        disk.lambda =
            local_mass_at(tw, wroots, idx, w_pole_factors) * std::exp(-w_log_const);
      }
      auto E = [&](double rr) {
        return residual_profile_scaled(profiles.psi1, disk.lambda, t, j, kappa,
                                       DiskKind::moving_zero, rr);
      };
      double R = kappa * std::pow(std::abs(t), -1.0 / j);
      AnnulusNorm n = annulus_norm(E, R / 2.0, R);
      disk.log_sup_E = n.log_sup;
      disk.log_l2 = n.log_l2;
      rep.disks.push_back(disk);
    }

    const DiskResidual& dd = rep.disks.back();
    if (dd.log_l2 > kLogZero) {
      double a = 2.0 * dd.log_l2;
      if (sumsq_log <= kLogZero) sumsq_log = a;
      else {
        double hi = std::max(sumsq_log, a), lo = std::min(sumsq_log, a);
        sumsq_log = hi + std::log1p(std::exp(lo - hi));
      }
    }
  }
  rep.log_total = sumsq_log <= kLogZero ? kLogZero : 0.5 * sumsq_log;
  return rep;
}

DecayFit decay_fit(const std::vector<std::pair<double, double>>& samples, double sigma) {
  if (samples.size() < 4)
    throw std::invalid_argument("decay_fit: need at least 4 samples");
  for (size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].first > samples[i - 1].first))
      throw std::invalid_argument("decay_fit: t must be increasing");
  // y = b0 - b1 * t^sigma
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(samples.size());
  for (const auto& [t, y] : samples) {
    double x = std::pow(t, sigma);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double det = n * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("decay_fit: degenerate samples");
  double slope = (n * sxy - sx * sy) / det;
  double inter = (sy - slope * sx) / n;
  double ybar = sy / n, ss_tot = 0, ss_res = 0;
  for (const auto& [t, y] : samples) {
    double x = std::pow(t, sigma);
    double pred = inter + slope * x;
    ss_tot += (y - ybar) * (y - ybar);
    ss_res += (y - pred) * (y - pred);
  }
  DecayFit fit;
  fit.c = std::exp(inter);
  fit.cprime = -slope;
  fit.r_squared = ss_tot == 0.0 ? 0.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

FreeDecayFit decay_fit_free_sigma(const std::vector<std::pair<double, double>>& samples) {
  auto sse = [&](double sigma) {
    DecayFit f = decay_fit(samples, sigma);
    return 1.0 - f.r_squared;
  };
  double lo = 0.05, hi = 1.5;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), dd = a + gr * (b - a);
  double fc = sse(c), fd = sse(dd);
  for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
    if (fc < fd) {
      b = dd;
      dd = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = sse(c);
    } else {
      a = c;
      c = dd;
      fc = fd;
      dd = a + gr * (b - a);
      fd = sse(dd);
    }
  }
  FreeDecayFit out;
  out.sigma = 0.5 * (a + b);
  out.fit = decay_fit(samples, out.sigma);
  return out;
}

std::string decay_table_csv(const std::vector<std::pair<double, double>>& samples) {
  std::ostringstream os;
  os << "t,log_total_norm\n";
  char buf[80];
  for (const auto& [t, y] : samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, y);
    os << buf;
  }
  return os.str();
}

}  // namespace hitchin
