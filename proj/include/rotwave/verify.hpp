#ifndef ROTWAVE_VERIFY_HPP
#define ROTWAVE_VERIFY_HPP

#include <string>
#include <vector>

#include "rotwave/harness.hpp"

// Operator property suite behind `rotwave verify`, plus the shell identity
// drivers shared by `rotwave identities` and the acceptance suite.

namespace rotwave {

struct CheckResult {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Run the property suite; empty filter = all modules.
std::vector<CheckResult> run_verify(const std::string& module_filter = "");

struct ShellIdentityReport {
  double commutation_residual = 0.0;     // Leray/averaging commutation, L2
  double viscosity_residual = 0.0;       // averaged-viscosity identity
  double curlcurl_residual = 0.0;        // avg(lap u) + avg(curl curl u)
  double traction_manufactured = 0.0;    // 3-form agreement on u = r a
  double traction_rigid = 0.0;           // |[S n]_tan| for rigid rotation
  double traction_order = 0.0;           // radial convergence order, generic
  double lifting_residual = 0.0;         // Navier back-substitution
  double incompressibility_residual = 0.0;
};

ShellIdentityReport run_shell_identities(const IdentitiesConfig& cfg);

}  // namespace rotwave

#endif
