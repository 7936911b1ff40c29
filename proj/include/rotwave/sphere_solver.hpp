#ifndef ROTWAVE_SPHERE_SOLVER_HPP
#define ROTWAVE_SPHERE_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rotwave/sphere_ops.hpp"

// Barotropic solver on the rotating unit sphere in vorticity-streamfunction
// form,
//   d_t zeta + u.grad_h zeta + (1/eps) u.grad_h z = mu lap_h zeta + curl_h F,
//   u = perp_grad_h invlap(zeta),  z = cos(theta).
//
// In spectral space the rotation term is diagonal: the mode (l,m) of the
// stream function carries the Rossby phase i m /(eps l(l+1)). The stepper
// exponentiates the full linear part exactly (integrating factor) and treats
// the advection term with RK4 on a 3/2-padded quadrature grid, which makes
// the retained quadratic interactions alias-free. Running accumulators for
// int u dt and for the advection term are advanced inside the same scheme,
// so the time integrals carry the integrator's full order.

namespace rotwave {

struct ForcingSpec {
  double amplitude = 0.0;
  int lmin = 2;
  int lmax = 4;
  std::uint64_t seed = 0;
};

struct RunConfig {
  int lmax = 31;
  double epsilon = 0.1;
  double mu = 0.0;
  double T = 1.0;
  double dt = 2e-3;
  std::uint64_t seed = 0;
  double M0 = 1.0;       // L2 norm of the initial velocity
  double alpha = -4.0;   // norm order for the recorded defect diagnostics
  bool nonlinear = true;
  std::optional<ForcingSpec> forcing;
  int snapshot_every = 0;  // steps between snapshots; 0 = auto (~128 total)
  // initial-data band within [2, lmax/2]; 0 = band edge defaults
  int init_lmin = 0;
  int init_lsup = 0;

  void validate() const;  // throws std::invalid_argument
};

struct SphereState {
  SpectralScalar zeta;       // relative vorticity
  double epsilon = 0.0;
  double mu = 0.0;
  double t = 0.0;
  SpectralScalar accum_psi;  // int_0^t Psi dt (stream function of int u)
  SpectralScalar accum_adv;  // int_0^t [nonlinear + forcing] dt, zeta space

  TangentField velocity() const;       // u = perp_grad invlap zeta
  TangentField time_integral() const;  // int_0^t u dt from accum_psi
  double energy() const;               // |u|^2_{L2}
};

struct SolverSnapshot {
  double t = 0.0;
  double energy = 0.0;
  double zonal_defect = 0.0;       // |(1-Pi) int u|_{H^alpha}
  double lh_integral_norm = 0.0;   // |int L_h u|_{H^{alpha+2}}
};

struct RunRecord {
  SphereState final_state;
  TangentField time_integral;
  std::vector<SolverSnapshot> history;
  std::vector<double> energy_steps;      // per accepted step
  double energy_initial = 0.0;
  double energy_final = 0.0;
  double dissipation_integral = 0.0;     // int |grad u|^2 dt (= enstrophy)
  double zonal_defect = 0.0;             // at T, order alpha
  double lh_integral_norm = 0.0;         // at T, order alpha+2
  double a1_norm = 0.0;                  // |int P grad_u u dt|_{H^{alpha+2}}
  double m_ext = 0.0;                    // forcing defect term
  double wave_identity_residual = 0.0;   // relative, zeta space
};

class SphereSolver {
 public:
  explicit SphereSolver(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  const GridPtr& quad_grid() const { return quad_grid_; }

  SphereState init_state() const;
  void step(SphereState& s, double dt);
  RunRecord run_accumulate();

  // advective CFL estimate for the current state
  double stable_dt(const SphereState& s) const;

  // N(zeta) = -dealias(u.grad zeta) + curl F, in zeta space
  SpectralScalar nonlinear_term(const SpectralScalar& zeta) const;

 private:
  void ensure_propagators(double dt);

  RunConfig cfg_;
  GridPtr quad_grid_;
  SpectralScalar curl_forcing_;
  double cached_dt_ = -1.0;
  // packed by SpectralScalar::index over cfg_.lmax
  Eigen::VectorXcd e_half_, e_full_, s_half_, s_full_;
};

// |(1 - Pi_zonal) ti|_{H^alpha}
double zonal_defect(const TangentField& ti, double alpha);

RunRecord run_accumulate(const RunConfig& cfg);

}  // namespace rotwave

#endif
