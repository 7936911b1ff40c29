#ifndef ROTWAVE_MHD_HPP
#define ROTWAVE_MHD_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotwave/spharm.hpp"  // Complex

// Pseudo-spectral rotating MHD on the periodic box [0,2pi)^3 for the
// velocity / induced-field pair,
//   d_t u + P(u.grad u - b.grad b) = (1/eps) P(u x e_z + (curl b) x e_z)
//   d_t b + (u.grad b - b.grad u)  = (1/eps) curl(u x e_z) = (1/eps) d_z u
// Fields are real, stored as r2c Fourier coefficients with a 2/3-rule
// dealiasing mask. The wave operator is block-diagonal per wavevector
// (a skew-Hermitian 6x6), and time stepping composes its exact per-mode
// exponential with RK4 for the advective terms. The ker of the wave
// operator on the box is exactly the z-independent (xi_3 = 0) modes, so the
// decay diagnostics are reported on the xi_3 != 0 projection with the
// kernel component listed separately.

namespace rotwave {

class BoxGrid {
 public:
  static std::shared_ptr<const BoxGrid> build(int n);
  ~BoxGrid();
  BoxGrid(const BoxGrid&) = delete;

  int n() const { return n_; }
  int ncomplex() const { return n_ * n_ * (n_ / 2 + 1); }
  int nreal() const { return n_ * n_ * n_; }
  int dealias_cut() const { return n_ / 3; }

  int index(int ix, int iy, int iz) const {
    return (ix * n_ + iy) * (n_ / 2 + 1) + iz;
  }
  // signed wavevector components of a linear complex index
  void wavevector(int idx, int k[3]) const;
  double mult(int idx) const;  // conjugate-pair multiplicity (1 or 2)

  const std::vector<int>& masked() const { return masked_; }

  // unnormalized FFTW transforms; analysis divides by n^3
  void forward(const Eigen::VectorXd& real, Eigen::VectorXcd& spec) const;
  void backward(const Eigen::VectorXcd& spec, Eigen::VectorXd& real) const;

 private:
  explicit BoxGrid(int n);
  int n_;
  std::vector<int> masked_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

using BoxPtr = std::shared_ptr<const BoxGrid>;

// three-component Fourier field in r2c layout
struct Field3 {
  std::array<Eigen::VectorXcd, 3> c;

  Field3() = default;
  explicit Field3(const BoxPtr& g) {
    for (auto& v : c) v = Eigen::VectorXcd::Zero(g->ncomplex());
  }
};

struct MhdState {
  BoxPtr grid;
  Field3 u, b;
  double epsilon = 0.1;
  double t = 0.0;
  Field3 accum_u, accum_b;        // int (u,b) dt
  Field3 accum_nl_u, accum_nl_b;  // int [advective terms] dt

  double divergence_residual() const;  // max |xi.u|, |xi.b| over modes
  double energy() const;               // |(u,b)|^2_{L2}
};

struct MhdConfig {
  int n = 32;
  double epsilon = 0.1;
  double T = 1.0;
  double dt = 2e-3;
  std::uint64_t seed = 0;
  double M0 = 1.0;   // H^k norm of (u0, b0)
  int k = 3;         // Sobolev index (paper needs k > 5/2)
  double s = 12.0;   // Lebesgue exponent for the b diagnostics
  int init_kmax = 4; // initial shell 1 <= |xi| <= init_kmax
  bool nonlinear = true;
  double hyper_nu = 0.0;  // optional |xi|^4 hyperdissipation, off by default

  void validate() const;
};

// Leray projection P = I - xi xi^T/|xi|^2, applied in place on masked modes.
void project_leray_box(const BoxGrid& g, Field3& v);

// L(u,b) = (-curl invlap d_z u + d_z b, d_z u) per mode.
std::pair<Field3, Field3> apply_wave_operator(const MhdState& s);

// Full right-hand side (advective terms + wave term / eps).
std::pair<Field3, Field3> mhd_rhs(const MhdState& s);

class MhdSolver {
 public:
  explicit MhdSolver(MhdConfig cfg);

  const MhdConfig& config() const { return cfg_; }
  const BoxPtr& grid() const { return grid_; }

  MhdState init_state() const;
  void step(MhdState& s, double dt);

  // advective terms only: (P(j x b - omega x u), curl(u x b)), dealiased
  std::pair<Field3, Field3> nonlinear_term(const Field3& u,
                                           const Field3& b) const;

 private:
  void ensure_propagators(double dt);

  MhdConfig cfg_;
  BoxPtr grid_;
  double cached_dt_ = -1.0;
  using Mat6 = Eigen::Matrix<Complex, 6, 6>;
  std::vector<Mat6> e_half_, e_full_, s_half_, s_full_;  // per masked mode
};

struct MhdRunRecord {
  Field3 int_u, int_b;            // time integrals
  double energy_initial = 0.0;
  double energy_final = 0.0;
  double wave_defect_hk1 = 0.0;   // |L(int u, int b)|_{H^{k-1}}
  double dzu_hk1 = 0.0;           // |d_z int u|_{H^{k-1}}
  double dzcurlb_hk2 = 0.0;       // |d_z curl int b|_{H^{k-2}}
  double u_int_winf = 0.0;        // kernel-excluded |int u|_{W^{k-3,inf}}
  double b_int_wks = 0.0;         // kernel-excluded |int b|_{W^{max(k-4,0),s}}
  double kernel_component_l2 = 0.0;
  double hls_ratio = 0.0;         // fractional-integration chain ratio
  double wave_identity_residual = 0.0;
  double max_divergence = 0.0;
};

MhdRunRecord run_mhd(const MhdConfig& cfg);

// --- spectral norms over the box (Lebesgue measure on [0,2pi)^3) ---
double box_l2_norm(const BoxGrid& g, const Field3& f);
double box_sobolev_norm(const BoxGrid& g, const Field3& f, double sigma);
double box_winf_norm(const BoxGrid& g, const Field3& f);       // sup |f(x)|
double box_ws_norm(const BoxGrid& g, const Field3& f, double s);
Field3 kernel_part(const BoxGrid& g, const Field3& f);     // xi_3 = 0 modes
Field3 nonkernel_part(const BoxGrid& g, const Field3& f);  // xi_3 != 0 modes
Field3 dz(const BoxGrid& g, const Field3& f);
Field3 curl(const BoxGrid& g, const Field3& f);

// --- Nash / anisotropic inequality checks -------------------------------
struct InequalityCheck {
  std::string name;
  double nash_ratio = 0.0;   // |f|_inf^2 / (|f|_2 |f'|_2), 1D quadrature
  double aniso_ratio = 0.0;  // |g|_{Linf_z(H^m_xy)} / sqrt(|g|_Hm |dz g|_Hm)
};

// 25-function corpus; entry 0 is the unit Gaussian with analytic ratio
// sqrt(2/pi) = 0.7979.
std::vector<InequalityCheck> anisotropic_norm_checks(int n_grid = 32);

}  // namespace rotwave

#endif
