#include "hitchin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hitchin {

namespace {
constexpr double kPi = std::numbers::pi;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

const char* root_class_name(RootClass c) {
  switch (c) {
    case RootClass::moving_zero: return "moving-zero";
    case RootClass::tame_center: return "tame-center";
    case RootClass::twisted_center: return "twisted-center";
  }
  return "?";
}

std::string RamificationData::to_csv(double t) const {
  std::ostringstream os;
  os << "t,root_re,root_im,chart,class,local_mass,prediction_error\n";
  for (const auto& r : roots) {
    os << fmt_g17(t) << ',' << fmt_g17(r.value.real()) << ',' << fmt_g17(r.value.imag())
       << ',' << chart_name(r.chart) << ',' << root_class_name(r.cls) << ','
       << fmt_g17(r.local_mass) << ',';
    if (r.predicted) os << fmt_g17(std::abs(r.value - *r.predicted));
    os << '\n';
  }
  return os.str();
}

RegularReport classify_regular(const BasePoint& base, const std::vector<cplx>& roots,
                               double t_scale) {
  RegularReport rep;
  const double tol = 1e-8 * std::max(1.0, std::pow(std::abs(t_scale), 0.25));
  rep.min_separation = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j) {
      double d = std::abs(roots[i] - roots[j]);
      rep.min_separation = std::min(rep.min_separation, d);
      if (d < tol) {
        std::ostringstream os;
        os << "roots " << i << " and " << j << " closer than tolerance (" << d << ")";
        rep.violations.push_back(os.str());
      }
    }
  ComplexPolynomial tn = tilde_nu(base);
  if (tn.degree() < 1) rep.violations.push_back("tilde_nu degenerates to a constant");
  for (size_t i = 0; i < roots.size(); ++i) {
    for (int pi = 0; pi < base.divisor.pole_count(); ++pi) {
      const auto& p = base.divisor.poles[pi];
      if (p.location.at_infinity) continue;
      if (std::abs(roots[i] - p.location.z) < tol) {
        if (p.kind == PoleKind::untwisted) {
          std::ostringstream os;
          os << "root " << i << " coincides with the untwisted pole at ("
             << p.location.z.real() << "," << p.location.z.imag() << ")";
          rep.violations.push_back(os.str());
        }
        // twisted/tame centers are the forced roots; allowed
      }
    }
  }
  rep.regular = rep.violations.empty();
  return rep;
}

std::vector<cplx> root_asymptotics(const BasePoint& base, cplx t) {
  const auto& d = base.divisor;
  if (d.has_infinity())
    throw std::invalid_argument(
        "root_asymptotics: closed-form predictions require all poles finite");
  const int N = d.total_order();
  const cplx nu_top = base.free_coeffs.back();
  if (nu_top == cplx(0.0))
    throw std::invalid_argument("root_asymptotics: nu_{N-4} must be nonzero");
  const int d0 = d.designated_pole();
  if (d.poles[d0].location.z != cplx(0.0))
    throw std::invalid_argument("root_asymptotics: designated pole must sit at 0");

  std::vector<cplx> out;
  for (int i = 0; i < d.pole_count(); ++i) {
    const auto& p = d.poles[i];
    const cplx x = p.location.z;
    if (p.kind == PoleKind::tame) {
      out.push_back(x);
      continue;
    }
    int cluster;
    cplx mu_lead;
    if (i == d0) {
      cluster = (p.kind == PoleKind::untwisted) ? p.order + N - 4 : p.order + N - 5;
      mu_lead = (p.kind == PoleKind::untwisted) ? p.mu_at(2 * p.order)
                                                : p.mu_at(2 * p.order - 1);
    } else {
      cluster = (p.kind == PoleKind::untwisted) ? p.order : p.order - 1;
      mu_lead = (p.kind == PoleKind::untwisted) ? p.mu_at(2 * p.order)
                                                : p.mu_at(2 * p.order - 1);
    }
    cplx prod = 1.0;
    for (int j = 0; j < d.pole_count(); ++j) {
      if (j == i) continue;
      const cplx y = d.poles[j].location.z;
      for (int k = 0; k < d.poles[j].order; ++k) prod *= (x - y);
    }
    cplx coeff = -mu_lead / nu_top * prod;
    if (i != d0) coeff *= std::pow(x, 4.0 - N);
    cplx radial = std::pow(coeff, 1.0 / cluster) * std::pow(t, -1.0 / cluster);
    for (int j = 0; j < cluster; ++j) {
      cplx rot = std::exp(cplx(0.0, 2.0 * kPi * j / cluster));
      out.push_back(x + radial * rot);
    }
    if (p.kind == PoleKind::twisted) out.push_back(x);  // forced center
  }
  return out;
}

double local_mass_at(const ComplexPolynomial& tilde, const std::vector<cplx>& all_roots,
                     size_t root_index,
                     const std::vector<std::pair<cplx, int>>& pole_factors) {
  const cplx p = all_roots[root_index];
  double log_num = std::log(std::abs(tilde.leading()));
  for (size_t j = 0; j < all_roots.size(); ++j) {
    if (j == root_index) continue;
    log_num += std::log(std::abs(p - all_roots[j]));
  }
  double log_den = 0.0;
  for (const auto& [y, e] : pole_factors) {
    if (y == p) continue;  // center roots: the pole's own factor is cancelled
    log_den += e * std::log(std::abs(p - y));
  }
  return std::exp(0.5 * (log_num - log_den));
}

namespace {

struct CenterMatch {
  int pole_index = -1;
  RootClass cls = RootClass::moving_zero;
};

CenterMatch match_center(const BasePoint& base, cplx root, double tol) {
  for (int pi = 0; pi < base.divisor.pole_count(); ++pi) {
    const auto& p = base.divisor.poles[pi];
    if (p.location.at_infinity) continue;
    if (std::abs(root - p.location.z) < tol) {
      if (p.kind == PoleKind::twisted) return {pi, RootClass::twisted_center};
      if (p.kind == PoleKind::tame) return {pi, RootClass::tame_center};
    }
  }
  return {};
}

int nearest_pole(const BasePoint& base, cplx root) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (int pi = 0; pi < base.divisor.pole_count(); ++pi) {
    const auto& p = base.divisor.poles[pi];
    double dist = p.location.at_infinity
                      ? (std::abs(root) > 1.0 ? 1.0 / std::abs(root) : 2.0)
                      : std::abs(root - p.location.z);
    if (dist < bd) {
      bd = dist;
      best = pi;
    }
  }
  return best;
}

}  // namespace

RamificationData local_masses(const BasePoint& base, const std::vector<cplx>& roots) {
  ComplexPolynomial tn = tilde_nu(base);
  const int N = base.divisor.total_order();
  const double tol = 1e-8 * std::max(1.0, std::pow(std::abs(base.scalings.back()), 0.25));

  std::vector<std::pair<cplx, int>> pole_factors;
  for (const auto& p : base.divisor.poles)
    if (!p.location.at_infinity) pole_factors.push_back({p.location.z, 2 * p.order});

  // snapped copies of the inputs: forced centers land exactly on the pole
  std::vector<cplx> snapped = roots;
  std::vector<CenterMatch> matches(roots.size());
  for (size_t i = 0; i < roots.size(); ++i) {
    matches[i] = match_center(base, roots[i], tol);
    if (matches[i].pole_index >= 0)
      snapped[i] = base.divisor.poles[matches[i].pole_index].location.z;
  }

  std::optional<std::vector<cplx>> preds;
  try {
    preds = root_asymptotics(base, base.scalings.back());
  } catch (const std::invalid_argument&) {
  }

  RamificationData data;
  for (size_t i = 0; i < snapped.size(); ++i) {
    for (size_t j = 0; j < snapped.size(); ++j)
      if (j != i && snapped[i] == snapped[j] && j < i)
        throw std::runtime_error("local_masses: repeated root (regular locus required)");
    RamificationRoot r;
    r.value = snapped[i];
    r.chart = Chart::z;
    r.cls = matches[i].cls;
    r.pole_index =
        matches[i].pole_index >= 0 ? matches[i].pole_index : nearest_pole(base, snapped[i]);
    r.local_mass = local_mass_at(tn, snapped, i, pole_factors);
    if (preds) {
      double bd = std::numeric_limits<double>::infinity();
      cplx bp = 0.0;
      for (const auto& q : *preds) {
        double dd = std::abs(q - snapped[i]);
        if (dd < bd) {
          bd = dd;
          bp = q;
        }
      }
      r.predicted = bp;
    }
    data.roots.push_back(r);
  }

  // forced roots at infinity (twisted/tame pole there), reported in the w chart
  for (int pi = 0; pi < base.divisor.pole_count(); ++pi) {
    const auto& p = base.divisor.poles[pi];
    if (!p.location.at_infinity || p.kind == PoleKind::untwisted) continue;
    ComplexPolynomial tw = tilde_nu_w_chart(base);
    RamificationRoot r;
    r.value = 0.0;
    r.chart = Chart::w;
    r.cls = p.kind == PoleKind::twisted ? RootClass::twisted_center : RootClass::tame_center;
    r.pole_index = pi;
    if (tw.coeffs.size() < 2 || std::abs(tw.coeffs[0]) > tol * evaluation_scale(tw, 1.0))
      throw std::runtime_error("local_masses: expected forced root at infinity");
    // lambda^2 = |tilde_nu_w'(0)| (the (1 - x w) pole factors are 1 at w = 0)
    r.local_mass = std::sqrt(std::abs(tw.coeffs[1]));
    data.roots.push_back(r);
  }

  if (static_cast<int>(data.roots.size()) > 2 * N - 4)
    throw std::logic_error("local_masses: more roots than 2N-4");
  return data;
}

RamificationData analyze_ramification(const BasePoint& base, double t_scale) {
  ComplexPolynomial tn = tilde_nu(base);
  std::vector<cplx> roots = find_roots(tn);
  RegularReport rep = classify_regular(base, roots, t_scale);
  if (!rep.regular) {
    std::string msg = "analyze_ramification: base point is outside the regular locus:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw std::runtime_error(msg);
  }
  return local_masses(base, roots);
}

}  // namespace hitchin
