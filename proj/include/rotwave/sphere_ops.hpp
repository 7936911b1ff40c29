#ifndef ROTWAVE_SPHERE_OPS_HPP
#define ROTWAVE_SPHERE_OPS_HPP

#include <utility>

#include "rotwave/spharm.hpp"

// Tangent vector calculus on S^2 in the Hodge representation
//   u = grad_h(Phi) + perp_grad_h(Psi),   perp_grad_h f = e_r x grad_h f.
// Divergence-free fields carry Phi == 0. Vector analysis is done by
// quadrature against the vector harmonics grad Y_l^m / perp grad Y_l^m,
// which is exact for band-limited fields on the matching Gauss grid.

namespace rotwave {

struct GridTangent {
  GridPtr grid;
  GridArray u_theta, u_phi;  // nlat x nlon each

  GridTangent() = default;
  explicit GridTangent(GridPtr g)
      : grid(std::move(g)),
        u_theta(GridArray::Zero(grid->nlat(), grid->nlon())),
        u_phi(GridArray::Zero(grid->nlat(), grid->nlon())) {}
};

struct TangentField {
  SpectralScalar hodge_phi;  // curl-free potential
  SpectralScalar hodge_psi;  // stream function

  TangentField() = default;
  explicit TangentField(int lmax) : hodge_phi(lmax), hodge_psi(lmax) {}
  TangentField(SpectralScalar phi, SpectralScalar psi)
      : hodge_phi(std::move(phi)), hodge_psi(std::move(psi)) {}

  int lmax() const { return hodge_psi.lmax(); }
  bool divergence_free(double tol = 1e-11) const;
};

// (grad_h f, perp_grad_h f) on the grid; f must be zero-mean.
std::pair<GridTangent, GridTangent> surface_grad(const SpectralScalar& f,
                                                 const GridPtr& grid);

// (div_h u, curl_h u) as spectral scalars (both zero-mean by Stokes).
std::pair<SpectralScalar, SpectralScalar> surface_divcurl(const GridTangent& u);

// Phi = invlap(div_h u), Psi = invlap(curl_h u).
TangentField hodge_decompose(const GridTangent& u);

// Pointwise evaluation of grad Phi + perp grad Psi.
GridTangent synthesize_tangent(const TangentField& u, const GridPtr& grid);

// Longitude average of the e_phi component, re-embedded as a zonal field.
// Spectrally this is the m=0 restriction of Psi with Phi dropped.
GridTangent zonal_project(const TangentField& u, const GridPtr& grid);
TangentField zonal_part(const TangentField& u);
TangentField nonzonal_part(const TangentField& u);

// L_h u = P_h(u x e_r cos(theta)), evaluated pseudo-spectrally on work_grid
// (needs one extra degree of headroom: work_grid lmax >= u.lmax+1).
// Requires divergence-free input.
TangentField apply_Lh(const TangentField& u, const GridPtr& work_grid);

// sqrt(|Phi|^2_{H^{a+1}} + |Psi|^2_{H^{a+1}}) with (l^2+l)^{a+1} weights.
double vector_sobolev_norm(const TangentField& u, double alpha);

// int_{S^2} a . b
double tangent_inner(const GridTangent& a, const GridTangent& b);
double tangent_l2_norm(const GridTangent& a);

}  // namespace rotwave

#endif
