#pragma once

#include <map>
#include <string>
#include <vector>

#include "hitchin/divisor.hpp"
#include "hitchin/painleve.hpp"
#include "hitchin/spectral.hpp"

namespace hitchin {

// Canonical smooth bump: chi(s) = f(2-2s) / (f(2-2s) + f(2s-1)) with
// f(u) = exp(-1/u) for u > 0, else 0. chi = 1 for s <= 1/2, 0 for s >= 1,
// nonincreasing, C-infinity.
struct CutoffValue {
  double chi = 0.0;
  double dchi = 0.0;
  double d2chi = 0.0;
};
CutoffValue cutoff_chi(double s);

enum class DiskKind { moving_zero, tame };

// Diagonal entries of the approximate metric in the normal-form frame:
// moving zeros (r^{1/2} e^{chi l}, r^{-1/2} e^{-chi l}); tame centers
// (r^{1/2} e^{chi m}, r^{3/2} e^{-chi m}). chi is evaluated at r/cutoff_scale.
std::pair<double, double> approx_metric_entries(const FiducialProfile& profile,
                                                double lambda, double r, DiskKind kind,
                                                double cutoff_scale);

// Scalar gluing error E(r) on a model disk, defined by
//   F + [Phi, Phi*] = E sigma_3 dzeta dzeta-bar.
// Moving zeros: chi argument r kappa^{-1} t^{1/jx}, profile argument
// 8 lambda r^{3/2}/3; support [kappa t^{-1/jx}/2, kappa t^{-1/jx}].
// Tame centers: chi argument r/kappa, profile argument 8 lambda r^{1/2};
// support [kappa/2, kappa]. Exactly zero outside the support annulus, and
// exactly zero on the chi plateaus (the profile ODE cancels there by the
// regrouped form used here). Throws std::domain_error for r <= 0.
double residual_profile(const FiducialProfile& profile, double lambda, double t, int jx,
                        double kappa, DiskKind kind, double r);

// Same, with the magnitude carried as mantissa * exp(log_scale) so deep-tail
// regimes (|E| far below double range) stay meaningful.
ScaledValue residual_profile_scaled(const FiducialProfile& profile, double lambda,
                                    double t, int jx, double kappa, DiskKind kind,
                                    double r);

struct ProfileSet {
  FiducialProfile psi1;
  std::map<int, FiducialProfile> psi2_by_pole;  // keyed by tame pole index
};

// psi1 plus one psi2 per tame pole of the divisor (by its alpha1 weight).
ProfileSet make_profiles(const IrregularDivisor& divisor,
                         double rho_min = kDefaultRhoMin, double rho_max = kDefaultRhoMax,
                         int n_points = kDefaultProfilePoints);

struct DiskResidual {
  cplx root = 0.0;
  Chart chart = Chart::z;
  RootClass cls = RootClass::moving_zero;
  int cluster_exponent = 1;  // j(x) for moving zeros; 0 for tame disks
  double lambda = 0.0;
  double log_sup_E = 0.0;  // log of the pointwise max over the annulus
  double log_l2 = 0.0;     // log of the annulus L2 norm
};

struct ResidualReport {
  double t = 0.0;
  double kappa = 0.0;
  Sigma sigma;
  std::vector<DiskResidual> disks;
  double log_total = 0.0;  // log of sqrt(sum of squared annulus norms)
  double total() const;    // exp(log_total); 0 when it underflows

  std::string to_json() const;
};

// L2 norm (flat measure in the normal-form coordinate, axisymmetric factor
// 2 pi) of the gluing error over every cutoff annulus: one disk per moving
// zero, one per tame center; twisted centers and untwisted pole disks carry
// no cutoff and contribute nothing.
ResidualReport residual_l2_norm(const BasePoint& base, double t,
                                const ProfileSet& profiles, double kappa = 0.3);

struct DecayFit {
  double c = 0.0;        // prefactor
  double cprime = 0.0;   // rate
  double r_squared = 0.0;
};

// Least squares of log-norm = log c - c' t^sigma over the samples (t, log-norm).
// Requires >= 4 samples with increasing t.
DecayFit decay_fit(const std::vector<std::pair<double, double>>& samples, double sigma);

// Two-parameter variant: also optimizes sigma by golden-section search.
struct FreeDecayFit {
  DecayFit fit;
  double sigma = 0.0;
};
FreeDecayFit decay_fit_free_sigma(const std::vector<std::pair<double, double>>& samples);

// CSV decay table: rows (t, log_total_norm).
std::string decay_table_csv(const std::vector<std::pair<double, double>>& samples);

}  // namespace hitchin
