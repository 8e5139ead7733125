#include "hitchin/quad2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hitchin/gluing.hpp"  // cutoff_chi

namespace hitchin {

namespace {

constexpr double kPi = std::numbers::pi;

struct Patch {
  cplx center;
  double radius;
};

// Periodic trapezoid with doubling; integrand smooth and 2pi-periodic.
double phi_average(const std::function<double(double)>& f, int max_points, double tol,
                   double* err_out) {
  int n = 16;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += f(2.0 * kPi * i / n);
  double prev = sum / n;
  double cur = prev;
  double err = std::abs(prev);
  while (n < max_points) {
    double add = 0.0;
    for (int i = 0; i < n; ++i) add += f(2.0 * kPi * (i + 0.5) / n);
    n *= 2;
    cur = 0.5 * prev + 0.5 * add / (n / 2);
    err = std::abs(cur - prev);
    prev = cur;
    if (err <= tol * std::max(std::abs(cur), 1e-300)) break;
  }
  if (err_out) *err_out = err * 2.0 * kPi;
  return cur * 2.0 * kPi;  // integral over [0, 2pi]
}

struct Simpson1D {
  std::function<double(double)> f;
  double err = 0.0;
  int max_depth = 40;

  double run(double lo, double hi, double tol) {
    double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    return rec(lo, hi, tol, max_depth, flo, fmid, fhi);
  }

  double rec(double lo, double hi, double tol, int depth, double flo, double fmid,
             double fhi) {
    double mid = 0.5 * (lo + hi);
    double flm = f(0.5 * (lo + mid)), frm = f(0.5 * (mid + hi));
    double h = hi - lo;
    double whole = h / 6.0 * (flo + 4.0 * fmid + fhi);
    double left = h / 12.0 * (flo + 4.0 * flm + fmid);
    double right = h / 12.0 * (fmid + 4.0 * frm + fhi);
    double d = left + right - whole;
    if (depth <= 0 || std::abs(d) <= 15.0 * tol) {
      err += std::abs(d) / 15.0;
      return left + right + d / 15.0;
    }
    return rec(lo, mid, tol / 2.0, depth - 1, flo, flm, fmid) +
           rec(mid, hi, tol / 2.0, depth - 1, fmid, frm, fhi);
  }
};

}  // namespace

Quad2DResult integrate_disk(const std::function<double(cplx)>& density,
                            const std::vector<cplx>& singular_points, double R,
                            const Quad2DOptions& opts) {
  Quad2DResult out;
  long evals = 0;
  auto f = [&](cplx z) {
    ++evals;
    return density(z);
  };

  // interior patches
  std::vector<Patch> patches;
  for (size_t i = 0; i < singular_points.size(); ++i) {
    const cplx c = singular_points[i];
    if (std::abs(c) >= R) continue;
    double rad = 0.1 * std::max(1.0, R);
    for (size_t j = 0; j < singular_points.size(); ++j)
      if (j != i) rad = std::min(rad, 0.49 * std::abs(c - singular_points[j]));
    rad = std::min(rad, 0.8 * (R - std::abs(c)));
    if (!(rad > 0.0))
      throw std::runtime_error("integrate_disk: singular point too close to the rim");
    patches.push_back({c, rad});
  }

  auto patch_weight = [&](cplx z) {
    double w = 1.0;
    for (const auto& p : patches) {
      double s = std::abs(z - p.center) / p.radius;
      if (s < 1.0) w -= cutoff_chi(s).chi;
    }
    return std::max(w, 0.0);
  };

  // coarse magnitude estimate: fixed 48 x 64 polar grid plus patch cores
  double coarse = 0.0;
  {
    const int nr = 48, np = 64;
    for (int i = 0; i < nr; ++i) {
      double r = R * (i + 0.5) / nr;
      double local = 0.0;
      for (int k = 0; k < np; ++k) {
        cplx z = std::polar(r, 2.0 * kPi * (k + 0.5) / np);
        double w = patch_weight(z);
        if (w > 0.0) local += w * f(z);
      }
      coarse += local * r * (R / nr) * (2.0 * kPi / np);
    }
    for (const auto& p : patches) {
      const int pr = 16, pp = 32;
      for (int i = 0; i < pr; ++i) {
        double r = p.radius * (i + 0.5) / pr;
        double local = 0.0;
        for (int k = 0; k < pp; ++k) {
          cplx z = p.center + std::polar(r, 2.0 * kPi * (k + 0.5) / pp);
          double s = r / p.radius;
          local += cutoff_chi(s).chi * f(z);
        }
        coarse += local * r * (p.radius / pr) * (2.0 * kPi / pp);
      }
    }
  }
  coarse = std::max(coarse, 1e-300);
  const double abs_tol = opts.rel_tol * coarse / (patches.size() + 1.0);

  double total = 0.0, err_total = 0.0;

  // patch integrals: chi-weighted polar about the singular point
  for (const auto& p : patches) {
    double phi_err_acc = 0.0;
    Simpson1D radial;
    radial.max_depth = opts.max_depth;
    radial.f = [&](double r) {
      double rr = std::max(r, 1e-12 * p.radius);
      double chi = cutoff_chi(rr / p.radius).chi;
      if (chi == 0.0) return 0.0;
      double perr = 0.0;
      double avg = phi_average(
          [&](double phi) { return f(p.center + std::polar(rr, phi)); },
          opts.max_phi_points, opts.rel_tol * 0.1, &perr);
      phi_err_acc = std::max(phi_err_acc, perr * rr);
      return chi * avg * rr;
    };
    total += radial.run(0.0, p.radius, abs_tol);
    err_total += radial.err + phi_err_acc * p.radius;
  }

  // background: polar about the origin, patch cores removed smoothly
  {
    double phi_err_acc = 0.0;
    Simpson1D radial;
    radial.max_depth = opts.max_depth;
    radial.f = [&](double r) {
      if (r <= 0.0) return 0.0;
      double perr = 0.0;
      double avg = phi_average(
          [&](double phi) {
            cplx z = std::polar(r, phi);
            double w = patch_weight(z);
            return w > 0.0 ? w * f(z) : 0.0;
          },
          opts.max_phi_points, opts.rel_tol * 0.1, &perr);
      phi_err_acc = std::max(phi_err_acc, perr * r);
      return avg * r;
    };
    total += radial.run(0.0, R, abs_tol);
    err_total += radial.err + phi_err_acc * R;
  }

  out.value = 2.0 * total;  // i dz dz-bar = 2 dx dy
  out.error_estimate = 2.0 * err_total;
  out.evaluations = evals;
  return out;
}

}  // namespace hitchin
