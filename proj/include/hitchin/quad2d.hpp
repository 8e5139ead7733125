#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace hitchin {

using cplx = std::complex<double>;

struct Quad2DResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

struct Quad2DOptions {
  double rel_tol = 1e-5;
  int max_phi_points = 4096;
  int max_depth = 40;
};

// Integral of density over the disk |zeta| <= R against the measure
// i dzeta dzeta-bar (= 2 dx dy). The density may blow up like 1/|zeta - p| at
// the listed singular points; each interior one gets a smooth-bump polar
// patch (radius min(0.1 max(1,R), half distance to the nearest other point,
// 0.8 distance to the boundary)) where the Jacobian cancels the singularity;
// the remainder is integrated adaptively in polar coordinates about the
// origin. Singular points outside the closed disk are ignored.
Quad2DResult integrate_disk(const std::function<double(cplx)>& density,
                            const std::vector<cplx>& singular_points, double R,
                            const Quad2DOptions& opts = {});

}  // namespace hitchin
