#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace hitchin {

enum class ProfileKind { psi1, psi2 };

// Scaled evaluation record: value = mantissa * exp(log_scale). The tail of a
// fiducial profile decays like exp(-rho), far below double range for the
// arguments the gluing error analysis needs, so evaluations carry an explicit
// log scale. log_scale == 0 in the tabulated region.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;
  double value() const { return mantissa * std::exp(log_scale); }
};

// Radial sinh-Gordon profile psi(rho) solving
//   psi'' + psi'/rho = (1/2) sinh(2 psi)
// on [rho_min, rho_max], tabulated on a grid uniform in log(rho).
struct FiducialProfile {
  ProfileKind kind = ProfileKind::psi1;
  double alpha1 = 0.25;       // only meaningful for psi2
  double robin_coefficient;   // rho psi'(rho) -> this value at rho_min
  std::vector<double> rho;    // strictly increasing
  std::vector<double> psi;
  std::vector<double> dpsi;   // psi'(rho)
  double certified_residual = 0.0;  // max defect of the log-coordinate collocation form
  double small_rho_constant = 0.0;  // psi(rho_min) - robin_coefficient * log(rho_min)

  double rho_min() const { return rho.front(); }
  double rho_max() const { return rho.back(); }

  // psi and psi' at any rho >= rho_min; cubic Hermite inside the grid, the
  // K0/pi tail beyond rho_max. Throws std::domain_error below rho_min.
  double eval_psi(double r) const;
  double eval_dpsi(double r) const;
  ScaledValue eval_psi_scaled(double r) const;
  ScaledValue eval_dpsi_scaled(double r) const;

  // CSV with one-line JSON header: kind, alpha1, residual, small-rho constant.
  std::string to_csv() const;
};

struct SolveOptions {
  int max_newton_iterations = 80;
  double newton_tolerance = 1e-9;  // absolute, in the 1/h^2-scaled equation units
};

// Fiducial solution with psi ~ K0/pi at infinity and psi ~ -(1/3) log rho at 0.
// Robin form of the small-rho law: rho psi'(rho) = -1/3 at rho_min.
FiducialProfile solve_psi1(double rho_min, double rho_max, int n_points,
                           const SolveOptions& opts = {});

// Tame-pole profile: rho psi' = 1 + 2 alpha1 - 2 alpha2 at rho_min
// (alpha2 = 1 - alpha1), K0/pi at rho_max. Requires 0 < alpha1 < 1/2.
FiducialProfile solve_psi2(double alpha1, double rho_min, double rho_max, int n_points,
                           const SolveOptions& opts = {});

// Profile argument laws from the approximate-metric construction:
// moving zeros use psi(8 lambda r^{3/2} / 3), tame centers psi(8 lambda r^{1/2}).
enum class ProfileArgument { moving_zero, tame };

double fiducial_argument(ProfileArgument kind, double lambda, double r);

// psi at the scaled argument; `exponent_kind` selects the argument law.
double eval_fiducial(const FiducialProfile& profile, double lambda, double r,
                     ProfileArgument exponent_kind);

inline constexpr double kDefaultRhoMin = 1e-5;
inline constexpr double kDefaultRhoMax = 20.0;
inline constexpr int kDefaultProfilePoints = 8000;

}  // namespace hitchin
