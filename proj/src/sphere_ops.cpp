#include "rotwave/sphere_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace rotwave {

namespace {

// Longitude-mode synthesis of the pair (d/dtheta f, (1/sin)d/dphi f)
// from scalar coefficients; writes the two half-spectra.
void derivative_modes(const SpectralScalar& c, const GaussGrid& g,
                      Eigen::MatrixXcd& mtheta, Eigen::MatrixXcd& mphi) {
  const int L = c.lmax();
  const int nc = g.nlon() / 2 + 1;
  mtheta = Eigen::MatrixXcd::Zero(g.nlat(), nc);
  mphi = Eigen::MatrixXcd::Zero(g.nlat(), nc);
  Eigen::VectorXcd col(L + 1);
  for (int m = 0; m <= L; ++m) {
    const int n = L - m + 1;
    for (int l = m; l <= L; ++l) col[l - m] = c.at(l, m);
    mtheta.col(m) = g.dplm(m).block(0, 0, g.nlat(), n) * col.head(n);
    if (m > 0) {
      Eigen::VectorXcd pm =
          g.plm(m).block(0, 0, g.nlat(), n) * col.head(n);
      const Complex im(0.0, double(m));
      for (int j = 0; j < g.nlat(); ++j)
        mphi(j, m) = im * pm[j] / g.sin_colat(j);
    }
  }
}

struct TangentAnalysis {
  SpectralScalar c_grad;  // <u, grad Y_l^m>
  SpectralScalar c_perp;  // <u, perp grad Y_l^m>
};

TangentAnalysis analyze_tangent(const GridTangent& u) {
  const GaussGrid& g = *u.grid;
  const int L = g.lmax();
  Eigen::MatrixXcd at(g.nlat(), g.nlon() / 2 + 1);
  Eigen::MatrixXcd ap(g.nlat(), g.nlon() / 2 + 1);
  g.lon_analyze(u.u_theta, at);
  g.lon_analyze(u.u_phi, ap);

  TangentAnalysis out{SpectralScalar(L), SpectralScalar(L)};
  Eigen::VectorXcd wt(g.nlat()), wp(g.nlat());
  for (int m = 0; m <= L; ++m) {
    const Complex im(0.0, double(m));
    for (int j = 0; j < g.nlat(); ++j) {
      wt[j] = g.weight(j) * at(j, m);
      wp[j] = g.weight(j) * ap(j, m);
    }
    const int n = L - m + 1;
    // <u, grad Y> = sum w [A_theta dP - im A_phi P / sin]
    // <u, perp grad Y> = sum w [im A_theta P / sin + A_phi dP]
    Eigen::VectorXcd gtheta = g.dplm(m).block(0, 0, g.nlat(), n).transpose() * wt;
    Eigen::VectorXcd gphi = g.dplm(m).block(0, 0, g.nlat(), n).transpose() * wp;
    Eigen::VectorXcd ptheta(n), pphi(n);
    if (m > 0) {
      Eigen::VectorXcd st(g.nlat()), sp(g.nlat());
      for (int j = 0; j < g.nlat(); ++j) {
        st[j] = wt[j] / g.sin_colat(j);
        sp[j] = wp[j] / g.sin_colat(j);
      }
      ptheta = g.plm(m).block(0, 0, g.nlat(), n).transpose() * st;
      pphi = g.plm(m).block(0, 0, g.nlat(), n).transpose() * sp;
    } else {
      ptheta.setZero(n);
      pphi.setZero(n);
    }
    const double neg = (m % 2) ? -1.0 : 1.0;
    for (int l = std::max(m, 1); l <= L; ++l) {
      Complex cg = gtheta[l - m] - im * pphi[l - m];
      Complex cp = im * ptheta[l - m] + gphi[l - m];
      out.c_grad.at(l, m) = cg;
      out.c_perp.at(l, m) = cp;
      if (m > 0) {
        out.c_grad.at(l, -m) = neg * std::conj(cg);
        out.c_perp.at(l, -m) = neg * std::conj(cp);
      }
    }
  }
  return out;
}

}  // namespace

bool TangentField::divergence_free(double tol) const {
  double scale =
      std::max(hodge_psi.coeffs().cwiseAbs().maxCoeff(),
               hodge_phi.coeffs().cwiseAbs().maxCoeff());
  if (scale == 0.0) return true;
  return hodge_phi.coeffs().cwiseAbs().maxCoeff() <= tol * scale;
}

std::pair<GridTangent, GridTangent> surface_grad(const SpectralScalar& f,
                                                 const GridPtr& grid) {
  const GaussGrid& g = *grid;
  if (f.lmax() > g.lmax())
    throw std::invalid_argument("surface_grad: lmax exceeds grid");
  if (!f.conjugate_symmetric())
    throw std::invalid_argument("surface_grad: coefficients not symmetric");
  Eigen::MatrixXcd mt, mp;
  derivative_modes(f, g, mt, mp);
  GridArray dth, dph;
  g.lon_synthesize(mt, dth);
  g.lon_synthesize(mp, dph);
  GridTangent grad(grid), perp(grid);
  grad.u_theta = dth;
  grad.u_phi = dph;
  perp.u_theta = -dph;  // e_r x grad f
  perp.u_phi = dth;
  return {grad, perp};
}

std::pair<SpectralScalar, SpectralScalar> surface_divcurl(
    const GridTangent& u) {
  TangentAnalysis ta = analyze_tangent(u);
  // div = lap(Phi): <u, grad Y> = -<div u, Y>
  SpectralScalar div(u.grid->lmax()), curl(u.grid->lmax());
  div.coeffs() = -ta.c_grad.coeffs();
  curl.coeffs() = -ta.c_perp.coeffs();
  return {div, curl};
}

TangentField hodge_decompose(const GridTangent& u) {
  TangentAnalysis ta = analyze_tangent(u);
  const int L = u.grid->lmax();
  TangentField out(L);
  for (int l = 1; l <= L; ++l)
    for (int m = -l; m <= l; ++m) {
      const double ll1 = double(l) * (l + 1);
      out.hodge_phi.at(l, m) = ta.c_grad.at(l, m) / ll1;
      out.hodge_psi.at(l, m) = ta.c_perp.at(l, m) / ll1;
    }
  return out;
}

GridTangent synthesize_tangent(const TangentField& u, const GridPtr& grid) {
  const GaussGrid& g = *grid;
  if (u.lmax() > g.lmax())
    throw std::invalid_argument("synthesize_tangent: lmax exceeds grid");
  Eigen::MatrixXcd pt, pp, st, sp;
  derivative_modes(u.hodge_phi, g, pt, pp);
  derivative_modes(u.hodge_psi, g, st, sp);
  // u_theta = d_theta Phi - (1/sin) d_phi Psi ; u_phi = (1/sin) d_phi Phi + d_theta Psi
  Eigen::MatrixXcd mtheta = pt - sp;
  Eigen::MatrixXcd mphi = pp + st;
  GridTangent out(grid);
  g.lon_synthesize(mtheta, out.u_theta);
  g.lon_synthesize(mphi, out.u_phi);
  return out;
}

TangentField zonal_part(const TangentField& u) {
  TangentField out(u.lmax());
  for (int l = 1; l <= u.lmax(); ++l)
    out.hodge_psi.at(l, 0) = u.hodge_psi.at(l, 0);
  return out;
}

TangentField nonzonal_part(const TangentField& u) {
  TangentField out = u;
  for (int l = 1; l <= u.lmax(); ++l) out.hodge_psi.at(l, 0) = 0.0;
  return out;
}

GridTangent zonal_project(const TangentField& u, const GridPtr& grid) {
  return synthesize_tangent(zonal_part(u), grid);
}

TangentField apply_Lh(const TangentField& u, const GridPtr& work_grid) {
  if (!u.divergence_free())
    throw std::invalid_argument("apply_Lh: input is not divergence-free");
  if (work_grid->lmax() < u.lmax() + 1)
    throw std::invalid_argument(
        "apply_Lh: work grid needs lmax >= u.lmax()+1 (cos theta raises "
        "bandwidth)");
  GridTangent ug = synthesize_tangent(u, work_grid);
  // v = (u x e_r) cos theta = (u_phi cos, -u_theta cos)
  GridTangent v(work_grid);
  for (int j = 0; j < work_grid->nlat(); ++j) {
    const double z = work_grid->cos_colat(j);
    v.u_theta.row(j) = z * ug.u_phi.row(j);
    v.u_phi.row(j) = -z * ug.u_theta.row(j);
  }
  TangentField w = hodge_decompose(v);
  // P_h keeps the rotational part only; exact result is band-limited to
  // u.lmax so the truncation is lossless.
  TangentField out(u.lmax());
  out.hodge_psi = w.hodge_psi.truncated(u.lmax());
  return out;
}

double vector_sobolev_norm(const TangentField& u, double alpha) {
  double s = 0.0;
  for (int l = 1; l <= u.lmax(); ++l) {
    const double wgt = std::pow(double(l) * l + l, alpha + 1.0);
    for (int m = -l; m <= l; ++m)
      s += wgt * (std::norm(u.hodge_phi.at(l, m)) +
                  std::norm(u.hodge_psi.at(l, m)));
  }
  return std::sqrt(s);
}

double tangent_inner(const GridTangent& a, const GridTangent& b) {
  const GaussGrid& g = *a.grid;
  double s = 0.0;
  for (int j = 0; j < g.nlat(); ++j)
    s += g.weight(j) * ((a.u_theta.row(j) * b.u_theta.row(j)).sum() +
                        (a.u_phi.row(j) * b.u_phi.row(j)).sum());
  return s * 2.0 * M_PI / g.nlon();
}

double tangent_l2_norm(const GridTangent& a) {
  return std::sqrt(std::max(0.0, tangent_inner(a, a)));
}

}  // namespace rotwave
