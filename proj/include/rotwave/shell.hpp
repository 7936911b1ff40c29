#ifndef ROTWAVE_SHELL_HPP
#define ROTWAVE_SHELL_HPP

#include <memory>
#include <utility>
#include <vector>

#include "rotwave/sphere_ops.hpp"

// 3D fields on the spherical shell (1-delta, 1+delta) x S^2, stored as
// radial stacks of surface grids with the component split
// u = w e_r + u_theta e_theta + u_phi e_phi. Radial discretization is
// Chebyshev-Gauss-Lobatto collocation; angular work reuses the S^2 spectral
// machinery level by level.

namespace rotwave {

class ShellGeometry {
 public:
  // delta in (0, 1/2); nodes r_0 = 1-delta < ... < r_{nr-1} = 1+delta.
  static std::shared_ptr<const ShellGeometry> build(double delta, int nr,
                                                    int lmax);

  double delta() const { return delta_; }
  int nr() const { return nr_; }
  double r(int i) const { return r_[i]; }
  const GridPtr& surface() const { return surface_; }

  // d/dr collocation matrix
  const Eigen::MatrixXd& deriv() const { return deriv_; }
  // weights for int_{1-delta}^{1+delta} (.) dr
  double radial_weight(int i) const { return wr_[i]; }
  // weights for the volume element: radial_weight * r^2
  double volume_weight(int i) const { return wr_[i] * r_[i] * r_[i]; }

 private:
  ShellGeometry(double delta, int nr, int lmax);

  double delta_;
  int nr_;
  std::vector<double> r_, wr_;
  Eigen::MatrixXd deriv_;
  GridPtr surface_;
};

using ShellPtr = std::shared_ptr<const ShellGeometry>;

struct ShellScalar {
  ShellPtr geom;
  std::vector<GridArray> level;  // nr entries, each nlat x nlon

  ShellScalar() = default;
  explicit ShellScalar(ShellPtr g);
};

struct ShellField {
  ShellPtr geom;
  std::vector<GridArray> w, u_theta, u_phi;

  ShellField() = default;
  explicit ShellField(ShellPtr g);
};

struct BoundaryData {
  GridTangent g_plus;   // shear data on r = 1+delta
  GridTangent g_minus;  // shear data on r = 1-delta
  double lambda = 0.0;  // >= 0
};

enum class Side { inner, outer };

// (1/2delta) int r u_h dr, a tangent field on S^2.
GridTangent barotropic_average(const ShellField& u);
// scalar variant: (1/2delta) int f dr
GridScalar barotropic_average_scalar(const ShellScalar& f);

// d/dr applied across levels
std::vector<GridArray> radial_derivative(const ShellGeometry& g,
                                         const std::vector<GridArray>& stack);

struct ShellDivCurl {
  ShellScalar div;
  ShellField curl;
};
// div u = r^-2 d_r(r^2 w) + r^-1 div_h u_h and the spherical-coordinate curl.
ShellDivCurl shell_vector_calculus(const ShellField& u);

// Componentwise vector Laplacian, computed through Cartesian components
// (each gets the scalar Laplacian; exact for band-limited levels).
ShellField shell_laplacian(const ShellField& u);

struct LerayParts {
  ShellField projected;    // Pu, divergence-free with zero normal flux
  ShellField gradient;     // Qu = grad f
  ShellScalar potential;   // f, volume-mean zero
  double max_interior_residual = 0.0;
};
// Solve lap f = div u, df/dn = u.n by per-(l,m) radial two-point BVPs.
LerayParts shell_leray_decompose(const ShellField& u);
ShellField shell_leray_project(const ShellField& u);

struct TractionForms {
  GridTangent form_a;  // +-(d_r u_h - u_h/r)
  GridTangent form_b;  // (curl u) x n -+ 2 u_h / r
  GridTangent direct;  // [S n]_tan from the stress tensor
};
// Requires u.n = 0 on the chosen boundary sphere.
TractionForms navier_traction(const ShellField& u, Side side);

// Solve the 2x2 boundary-lifting system for v = r^2 a + b pointwise:
//   (1+d+(1+d)^2 l) a + (-1/(1+d)+l) b = g_plus
//   (-1+d+(1-d)^2 l) a + ( 1/(1-d)+l) b = g_minus
std::pair<GridTangent, GridTangent> lift_boundary_data(const BoundaryData& bd,
                                                       double delta);
// v = r^2 a + b as a shell field
ShellField build_lifted_field(const GridTangent& a, const GridTangent& b,
                              const ShellPtr& geom);

struct EnergyReport {
  double energy = 0.0;         // |u|^2_{L2(Omega)}
  double grad_norm_sq = 0.0;   // |grad u|^2
  double stress_norm_sq = 0.0; // |S|^2, S = grad u + (grad u)^T
};
EnergyReport energy_report(const ShellField& u);

double shell_l2_norm(const ShellField& u);
double shell_scalar_l2_norm(const ShellScalar& f);

}  // namespace rotwave

#endif
