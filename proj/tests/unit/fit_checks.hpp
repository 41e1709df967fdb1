#pragma once

// Checks every converged BLML fit must pass: the root identity, unit mass
// and the f_c product bound on the density maximum.

#include "blml/solver.hpp"

#include <cmath>
#include <string>

namespace blml::checks {

struct FitCheck
{
  double identity_error = 0.0; // relative
  double mass = 1.0;           // NaN when not 1-D
  double max_value = 0.0;      // NaN when not 1-D
  double bound = 0.0;
  bool ok = true;
  std::string message;
};

inline FitCheck check_fit(const BlmlFit& fit, bool integrate = true)
{
  FitCheck r;
  r.identity_error = root_identity_error(fit);
  r.bound = fit.fc.product();
  r.mass = std::nan("");
  r.max_value = std::nan("");
  if (!(r.identity_error <= 1e-6)) {
    r.ok = false;
    r.message += "root identity error " + std::to_string(r.identity_error) + "; ";
  }
  if (integrate && fit.nodes.dim() == 1) {
    r.mass = density_mass_1d(fit);
    r.max_value = density_max_1d(fit);
    if (!(std::abs(r.mass - 1.0) <= 1e-3)) {
      r.ok = false;
      r.message += "mass " + std::to_string(r.mass) + "; ";
    }
    if (!(r.max_value <= r.bound * (1.0 + 1e-6))) {
      r.ok = false;
      r.message += "max " + std::to_string(r.max_value) + " above " + std::to_string(r.bound) + "; ";
    }
  }
  return r;
}

} // namespace blml::checks
