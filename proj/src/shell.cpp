#include "rotwave/shell.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rotwave/errors.hpp"

namespace rotwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

GridScalar level_scalar(const ShellPtr& geom, const GridArray& a) {
  GridScalar s(geom->surface());
  s.v = a;
  return s;
}

// Cartesian components of the local orthonormal frame at one surface node.
struct Frame {
  double er[3], eth[3], eph[3];
};

Frame frame_at(const GaussGrid& g, int j, int k) {
  const double st = g.sin_colat(j), ct = g.cos_colat(j);
  const double cp = std::cos(g.lon(k)), sp = std::sin(g.lon(k));
  return Frame{{st * cp, st * sp, ct}, {ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

// per-level (d_theta f, (1/sin) d_phi f) from a grid scalar
std::pair<GridArray, GridArray> angular_derivs(const ShellPtr& geom,
                                               const GridArray& f) {
  SpectralScalar c = analyze(level_scalar(geom, f));
  c.at(0, 0) = 0.0;  // gradient ignores the mean
  auto [grad, perp] = surface_grad(c, geom->surface());
  return {grad.u_theta, grad.u_phi};
}

struct CartesianStacks {
  std::vector<GridArray> x, y, z;
};

CartesianStacks to_cartesian(const ShellField& u) {
  const GaussGrid& g = *u.geom->surface();
  const int nr = u.geom->nr();
  CartesianStacks c;
  c.x.resize(nr);
  c.y.resize(nr);
  c.z.resize(nr);
  for (int i = 0; i < nr; ++i) {
    c.x[i].resize(g.nlat(), g.nlon());
    c.y[i].resize(g.nlat(), g.nlon());
    c.z[i].resize(g.nlat(), g.nlon());
    for (int j = 0; j < g.nlat(); ++j)
      for (int k = 0; k < g.nlon(); ++k) {
        Frame fr = frame_at(g, j, k);
        const double w = u.w[i](j, k), ut = u.u_theta[i](j, k),
                     up = u.u_phi[i](j, k);
        c.x[i](j, k) = w * fr.er[0] + ut * fr.eth[0] + up * fr.eph[0];
        c.y[i](j, k) = w * fr.er[1] + ut * fr.eth[1] + up * fr.eph[1];
        c.z[i](j, k) = w * fr.er[2] + ut * fr.eth[2] + up * fr.eph[2];
      }
  }
  return c;
}

ShellField from_cartesian(const ShellPtr& geom, const CartesianStacks& c) {
  const GaussGrid& g = *geom->surface();
  ShellField u(geom);
  for (int i = 0; i < geom->nr(); ++i)
    for (int j = 0; j < g.nlat(); ++j)
      for (int k = 0; k < g.nlon(); ++k) {
        Frame fr = frame_at(g, j, k);
        const double x = c.x[i](j, k), y = c.y[i](j, k), z = c.z[i](j, k);
        u.w[i](j, k) = x * fr.er[0] + y * fr.er[1] + z * fr.er[2];
        u.u_theta[i](j, k) = x * fr.eth[0] + y * fr.eth[1] + z * fr.eth[2];
        u.u_phi[i](j, k) = x * fr.eph[0] + y * fr.eph[1] + z * fr.eph[2];
      }
  return u;
}

// Cartesian gradient of a shell scalar: (d_x f, d_y f, d_z f) stacks.
CartesianStacks scalar_gradient(const ShellPtr& geom,
                                const std::vector<GridArray>& f) {
  const GaussGrid& g = *geom->surface();
  const int nr = geom->nr();
  std::vector<GridArray> fr = radial_derivative(*geom, f);
  CartesianStacks out;
  out.x.resize(nr);
  out.y.resize(nr);
  out.z.resize(nr);
  for (int i = 0; i < nr; ++i) {
    auto [dth, dph] = angular_derivs(geom, f[i]);
    const double rinv = 1.0 / geom->r(i);
    out.x[i].resize(g.nlat(), g.nlon());
    out.y[i].resize(g.nlat(), g.nlon());
    out.z[i].resize(g.nlat(), g.nlon());
    for (int j = 0; j < g.nlat(); ++j)
      for (int k = 0; k < g.nlon(); ++k) {
        Frame frm = frame_at(g, j, k);
        const double gr = fr[i](j, k);
        const double gt = rinv * dth(j, k);
        const double gp = rinv * dph(j, k);
        out.x[i](j, k) = gr * frm.er[0] + gt * frm.eth[0] + gp * frm.eph[0];
        out.y[i](j, k) = gr * frm.er[1] + gt * frm.eth[1] + gp * frm.eph[1];
        out.z[i](j, k) = gr * frm.er[2] + gt * frm.eth[2] + gp * frm.eph[2];
      }
  }
  return out;
}

}  // namespace

ShellScalar::ShellScalar(ShellPtr g) : geom(std::move(g)) {
  const GaussGrid& s = *geom->surface();
  level.assign(geom->nr(), GridArray::Zero(s.nlat(), s.nlon()));
}

ShellField::ShellField(ShellPtr g) : geom(std::move(g)) {
  const GaussGrid& s = *geom->surface();
  w.assign(geom->nr(), GridArray::Zero(s.nlat(), s.nlon()));
  u_theta.assign(geom->nr(), GridArray::Zero(s.nlat(), s.nlon()));
  u_phi.assign(geom->nr(), GridArray::Zero(s.nlat(), s.nlon()));
}

std::shared_ptr<const ShellGeometry> ShellGeometry::build(double delta, int nr,
                                                          int lmax) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("ShellGeometry: delta must be in (0, 1/2)");
  if (nr < 4) throw std::invalid_argument("ShellGeometry: nr must be >= 4");
  return std::shared_ptr<const ShellGeometry>(
      new ShellGeometry(delta, nr, lmax));
}

ShellGeometry::ShellGeometry(double delta, int nr, int lmax)
    : delta_(delta), nr_(nr) {
  surface_ = GaussGrid::build(lmax);

  // Chebyshev-Gauss-Lobatto nodes, ascending in r
  const int N = nr - 1;
  std::vector<double> s(nr);
  r_.resize(nr);
  for (int i = 0; i < nr; ++i) {
    s[i] = -std::cos(kPi * i / N);
    r_[i] = 1.0 + delta_ * s[i];
  }
  r_[0] = 1.0 - delta_;
  r_[nr - 1] = 1.0 + delta_;

  // differentiation matrix from barycentric weights
  std::vector<double> lam(nr);
  for (int i = 0; i < nr; ++i)
    lam[i] = ((i % 2) ? -1.0 : 1.0) * ((i == 0 || i == N) ? 0.5 : 1.0);
  deriv_.resize(nr, nr);
  for (int i = 0; i < nr; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < nr; ++j) {
      if (i == j) continue;
      deriv_(i, j) = (lam[j] / lam[i]) / (s[i] - s[j]);
      rowsum += deriv_(i, j);
    }
    deriv_(i, i) = -rowsum;
  }
  deriv_ /= delta_;  // d/ds -> d/dr

  // Clenshaw-Curtis weights by moment matching on the Chebyshev basis:
  //   sum_j w_j T_k(s_j) = int_{-1}^{1} T_k,   k = 0..nr-1
  Eigen::MatrixXd V(nr, nr);
  Eigen::VectorXd mom(nr);
  for (int k = 0; k < nr; ++k) {
    for (int j = 0; j < nr; ++j)
      V(k, j) = std::cos(k * std::acos(std::clamp(s[j], -1.0, 1.0)));
    mom[k] = (k % 2 == 0) ? 2.0 / (1.0 - double(k) * k) : 0.0;
  }
  Eigen::VectorXd wq = V.partialPivLu().solve(mom);
  wr_.assign(wq.data(), wq.data() + nr);
  for (double& w : wr_) w *= delta_;  // ds -> dr
}

std::vector<GridArray> radial_derivative(const ShellGeometry& g,
                                         const std::vector<GridArray>& stack) {
  const Eigen::MatrixXd& D = g.deriv();
  const int nr = g.nr();
  std::vector<GridArray> out(nr);
  for (int i = 0; i < nr; ++i) {
    out[i] = D(i, 0) * stack[0];
    for (int ip = 1; ip < nr; ++ip) out[i] += D(i, ip) * stack[ip];
  }
  return out;
}

GridTangent barotropic_average(const ShellField& u) {
  const ShellGeometry& g = *u.geom;
  GridTangent avg(g.surface());
  const double inv2d = 1.0 / (2.0 * g.delta());
  for (int i = 0; i < g.nr(); ++i) {
    const double c = inv2d * g.radial_weight(i) * g.r(i);
    avg.u_theta += c * u.u_theta[i];
    avg.u_phi += c * u.u_phi[i];
  }
  return avg;
}

GridScalar barotropic_average_scalar(const ShellScalar& f) {
  const ShellGeometry& g = *f.geom;
  GridScalar avg(g.surface());
  const double inv2d = 1.0 / (2.0 * g.delta());
  for (int i = 0; i < g.nr(); ++i)
    avg.v += inv2d * g.radial_weight(i) * f.level[i];
  return avg;
}

ShellDivCurl shell_vector_calculus(const ShellField& u) {
  const ShellPtr& geom = u.geom;
  const int nr = geom->nr();

  std::vector<GridArray> r2w(nr), rut(nr), rup(nr);
  for (int i = 0; i < nr; ++i) {
    const double r = geom->r(i);
    r2w[i] = r * r * u.w[i];
    rut[i] = r * u.u_theta[i];
    rup[i] = r * u.u_phi[i];
  }
  std::vector<GridArray> d_r2w = radial_derivative(*geom, r2w);
  std::vector<GridArray> d_rut = radial_derivative(*geom, rut);
  std::vector<GridArray> d_rup = radial_derivative(*geom, rup);

  ShellDivCurl out{ShellScalar(geom), ShellField(geom)};
  for (int i = 0; i < nr; ++i) {
    const double r = geom->r(i);
    GridTangent uh(geom->surface());
    uh.u_theta = u.u_theta[i];
    uh.u_phi = u.u_phi[i];
    auto [divc, curlc] = surface_divcurl(uh);
    GridScalar div_h = synthesize(divc, geom->surface());
    GridScalar curl_h = synthesize(curlc, geom->surface());
    auto [dwth, dwph] = angular_derivs(geom, u.w[i]);

    out.div.level[i] = d_r2w[i] / (r * r) + div_h.v / r;
    out.curl.w[i] = curl_h.v / r;
    out.curl.u_theta[i] = (dwph - d_rup[i]) / r;
    out.curl.u_phi[i] = (d_rut[i] - dwth) / r;
  }
  return out;
}

ShellField shell_laplacian(const ShellField& u) {
  const ShellPtr& geom = u.geom;
  const int nr = geom->nr();
  CartesianStacks c = to_cartesian(u);
  CartesianStacks lap;
  for (auto* comp : {&c.x, &c.y, &c.z}) {
    // lap f = r^-2 d_r(r^2 d_r f) + r^-2 lap_h f
    std::vector<GridArray> fr = radial_derivative(*geom, *comp);
    for (int i = 0; i < nr; ++i) fr[i] *= geom->r(i) * geom->r(i);
    std::vector<GridArray> frr = radial_derivative(*geom, fr);
    std::vector<GridArray> lf(nr);
    for (int i = 0; i < nr; ++i) {
      const double r2 = geom->r(i) * geom->r(i);
      SpectralScalar ci = analyze(level_scalar(geom, (*comp)[i]));
      GridScalar lh = synthesize(laplace_beltrami(ci), geom->surface());
      lf[i] = frr[i] / r2 + lh.v / r2;
    }
    if (comp == &c.x)
      lap.x = std::move(lf);
    else if (comp == &c.y)
      lap.y = std::move(lf);
    else
      lap.z = std::move(lf);
  }
  return from_cartesian(geom, lap);
}

LerayParts shell_leray_decompose(const ShellField& u) {
  const ShellPtr& geom = u.geom;
  const GaussGrid& g = *geom->surface();
  const int nr = geom->nr();
  const int L = g.lmax();

  // spectral right-hand side per level: div u
  std::vector<GridArray> r2w(nr);
  for (int i = 0; i < nr; ++i) r2w[i] = geom->r(i) * geom->r(i) * u.w[i];
  std::vector<GridArray> d_r2w = radial_derivative(*geom, r2w);
  std::vector<SpectralScalar> rhs(nr, SpectralScalar(L));
  for (int i = 0; i < nr; ++i) {
    const double r = geom->r(i);
    GridTangent uh(geom->surface());
    uh.u_theta = u.u_theta[i];
    uh.u_phi = u.u_phi[i];
    auto [divc, curlc] = surface_divcurl(uh);
    SpectralScalar rad = analyze(level_scalar(geom, GridArray(d_r2w[i] / (r * r))));
    rhs[i].coeffs() = rad.coeffs() + divc.coeffs() / r;
  }
  SpectralScalar w_in = analyze(level_scalar(geom, u.w[0]));
  SpectralScalar w_out = analyze(level_scalar(geom, u.w[nr - 1]));

  const Eigen::MatrixXd& D = geom->deriv();
  Eigen::MatrixXd D2 = D * D;

  // coefficient stacks of the potential, m >= 0
  std::vector<Eigen::VectorXcd> fmodes(size_t(SpectralScalar::index(L, L)) + 1);
  double worst_residual = 0.0;

  for (int l = 0; l <= L; ++l) {
    const int n = (l == 0) ? nr + 1 : nr;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    A.topLeftCorner(nr, nr) = D2;
    for (int i = 0; i < nr; ++i) {
      const double r = geom->r(i);
      A.block(i, 0, 1, nr) += (2.0 / r) * D.row(i);
      A(i, i) -= double(l) * (l + 1) / (r * r);
    }
    A.block(0, 0, 1, nr) = D.row(0);  // Neumann at r = 1-delta
    A.block(nr - 1, 0, 1, nr) = D.row(nr - 1);  // Neumann at r = 1+delta
    if (l == 0) {
      A(0, nr) = 0.0;
      A(nr - 1, nr) = 0.0;
      // pure Neumann: fix the volume mean; a Lagrange multiplier on the
      // interior rows absorbs the quadrature-level incompatibility
      for (int i = 1; i < nr - 1; ++i) A(i, nr) = 1.0;
      for (int i = 0; i < nr; ++i) A(nr, i) = geom->volume_weight(i);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);

    for (int m = 0; m <= l; ++m) {
      Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
      for (int i = 0; i < nr; ++i) b[i] = rhs[i].at(l, m);
      b[0] = w_in.at(l, m);
      b[nr - 1] = w_out.at(l, m);
      Eigen::VectorXd fre = lu.solve(Eigen::VectorXd(b.real()));
      Eigen::VectorXd fim = lu.solve(Eigen::VectorXd(b.imag()));
      Eigen::VectorXcd f(n);
      f.real() = fre;
      f.imag() = fim;
      Eigen::VectorXcd res = A * f - b;
      const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
      worst_residual =
          std::max(worst_residual, res.cwiseAbs().maxCoeff() / scale);
      fmodes[SpectralScalar::index(l, m)] = f.head(nr);
    }
  }
  if (!(worst_residual < 1e-6))
    throw NumericFailure("shell Leray solve did not converge; residual " +
                         std::to_string(worst_residual));

  auto mode_stack_to_levels = [&](const std::vector<Eigen::VectorXcd>& modes) {
    std::vector<SpectralScalar> per_level(nr, SpectralScalar(L));
    for (int l = 0; l <= L; ++l)
      for (int m = 0; m <= l; ++m) {
        const Eigen::VectorXcd& v = modes[SpectralScalar::index(l, m)];
        const double neg = (m % 2) ? -1.0 : 1.0;
        for (int i = 0; i < nr; ++i) {
          per_level[i].at(l, m) = v[i];
          if (m > 0) per_level[i].at(l, -m) = neg * std::conj(v[i]);
        }
      }
    return per_level;
  };
  std::vector<Eigen::VectorXcd> dfmodes(fmodes.size());
  for (int l = 0; l <= L; ++l)
    for (int m = 0; m <= l; ++m) {
      const int idx = SpectralScalar::index(l, m);
      dfmodes[idx] = D * fmodes[idx];
    }
  std::vector<SpectralScalar> flev = mode_stack_to_levels(fmodes);
  std::vector<SpectralScalar> dflev = mode_stack_to_levels(dfmodes);

  LerayParts out{ShellField(geom), ShellField(geom), ShellScalar(geom),
                 worst_residual};
  for (int i = 0; i < nr; ++i) {
    out.potential.level[i] = synthesize(flev[i], geom->surface()).v;
    out.gradient.w[i] = synthesize(dflev[i], geom->surface()).v;
    SpectralScalar fi = flev[i];
    fi.at(0, 0) = 0.0;
    auto [grad, perp] = surface_grad(fi, geom->surface());
    out.gradient.u_theta[i] = grad.u_theta / geom->r(i);
    out.gradient.u_phi[i] = grad.u_phi / geom->r(i);
    out.projected.w[i] = u.w[i] - out.gradient.w[i];
    out.projected.u_theta[i] = u.u_theta[i] - out.gradient.u_theta[i];
    out.projected.u_phi[i] = u.u_phi[i] - out.gradient.u_phi[i];
  }
  return out;
}

ShellField shell_leray_project(const ShellField& u) {
  return shell_leray_decompose(u).projected;
}

TractionForms navier_traction(const ShellField& u, Side side) {
  const ShellPtr& geom = u.geom;
  const GaussGrid& g = *geom->surface();
  const int nr = geom->nr();
  const int lev = (side == Side::inner) ? 0 : nr - 1;
  const double sgn = (side == Side::inner) ? -1.0 : 1.0;
  const double r = geom->r(lev);

  double scale = 0.0;
  for (int i = 0; i < nr; ++i)
    scale = std::max({scale, u.w[i].abs().maxCoeff(),
                      u.u_theta[i].abs().maxCoeff(),
                      u.u_phi[i].abs().maxCoeff()});
  if (u.w[lev].abs().maxCoeff() > 1e-8 * std::max(scale, 1e-300))
    throw std::invalid_argument(
        "navier_traction: u.n != 0 on the requested boundary");

  std::vector<GridArray> dut = radial_derivative(*geom, u.u_theta);
  std::vector<GridArray> dup = radial_derivative(*geom, u.u_phi);

  TractionForms out{GridTangent(geom->surface()), GridTangent(geom->surface()),
                    GridTangent(geom->surface())};

  // +-(d_r u_h - u_h / r)
  out.form_a.u_theta = sgn * (dut[lev] - u.u_theta[lev] / r);
  out.form_a.u_phi = sgn * (dup[lev] - u.u_phi[lev] / r);

  // (curl u) x n -+ 2 u_h / r ; (curl u) x e_r = (c_phi, -c_theta)
  ShellDivCurl dc = shell_vector_calculus(u);
  out.form_b.u_theta =
      sgn * dc.curl.u_phi[lev] - sgn * 2.0 * u.u_theta[lev] / r;
  out.form_b.u_phi =
      -sgn * dc.curl.u_theta[lev] - sgn * 2.0 * u.u_phi[lev] / r;

  // [S n]_tan assembled from the Cartesian stress tensor
  CartesianStacks c = to_cartesian(u);
  CartesianStacks gx = scalar_gradient(geom, c.x);
  CartesianStacks gy = scalar_gradient(geom, c.y);
  CartesianStacks gz = scalar_gradient(geom, c.z);
  for (int j = 0; j < g.nlat(); ++j)
    for (int k = 0; k < g.nlon(); ++k) {
      Frame fr = frame_at(g, j, k);
      // A(a,b) = d u_a / d x_b at the boundary node
      double A[3][3] = {{gx.x[lev](j, k), gx.y[lev](j, k), gx.z[lev](j, k)},
                        {gy.x[lev](j, k), gy.y[lev](j, k), gy.z[lev](j, k)},
                        {gz.x[lev](j, k), gz.y[lev](j, k), gz.z[lev](j, k)}};
      double Sn[3];
      for (int a = 0; a < 3; ++a) {
        Sn[a] = 0.0;
        for (int b = 0; b < 3; ++b) Sn[a] += (A[a][b] + A[b][a]) * sgn * fr.er[b];
      }
      out.direct.u_theta(j, k) =
          Sn[0] * fr.eth[0] + Sn[1] * fr.eth[1] + Sn[2] * fr.eth[2];
      out.direct.u_phi(j, k) =
          Sn[0] * fr.eph[0] + Sn[1] * fr.eph[1] + Sn[2] * fr.eph[2];
    }
  return out;
}

std::pair<GridTangent, GridTangent> lift_boundary_data(const BoundaryData& bd,
                                                       double delta) {
  if (bd.lambda < 0.0)
    throw std::invalid_argument("lift_boundary_data: lambda must be >= 0");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument(
        "lift_boundary_data: delta must be in (0, 1/2)");
  const double l = bd.lambda;
  const double a11 = 1.0 + delta + (1.0 + delta) * (1.0 + delta) * l;
  const double a12 = -1.0 / (1.0 + delta) + l;
  const double a21 = -1.0 + delta + (1.0 - delta) * (1.0 - delta) * l;
  const double a22 = 1.0 / (1.0 - delta) + l;
  const double det = a11 * a22 - a12 * a21;  // positive by diagonal dominance

  GridTangent a(bd.g_plus.grid), b(bd.g_plus.grid);
  a.u_theta = (a22 * bd.g_plus.u_theta - a12 * bd.g_minus.u_theta) / det;
  a.u_phi = (a22 * bd.g_plus.u_phi - a12 * bd.g_minus.u_phi) / det;
  b.u_theta = (a11 * bd.g_minus.u_theta - a21 * bd.g_plus.u_theta) / det;
  b.u_phi = (a11 * bd.g_minus.u_phi - a21 * bd.g_plus.u_phi) / det;
  return {a, b};
}

ShellField build_lifted_field(const GridTangent& a, const GridTangent& b,
                              const ShellPtr& geom) {
  ShellField v(geom);
  for (int i = 0; i < geom->nr(); ++i) {
    const double r2 = geom->r(i) * geom->r(i);
    v.u_theta[i] = r2 * a.u_theta + b.u_theta;
    v.u_phi[i] = r2 * a.u_phi + b.u_phi;
  }
  return v;
}

EnergyReport energy_report(const ShellField& u) {
  const ShellPtr& geom = u.geom;
  const GaussGrid& g = *geom->surface();
  const double dphi = 2.0 * kPi / g.nlon();

  CartesianStacks c = to_cartesian(u);
  CartesianStacks gx = scalar_gradient(geom, c.x);
  CartesianStacks gy = scalar_gradient(geom, c.y);
  CartesianStacks gz = scalar_gradient(geom, c.z);

  EnergyReport rep;
  for (int i = 0; i < geom->nr(); ++i) {
    const double vw = geom->volume_weight(i);
    for (int j = 0; j < g.nlat(); ++j) {
      const double q = vw * g.weight(j) * dphi;
      for (int k = 0; k < g.nlon(); ++k) {
        const double usq = u.w[i](j, k) * u.w[i](j, k) +
                           u.u_theta[i](j, k) * u.u_theta[i](j, k) +
                           u.u_phi[i](j, k) * u.u_phi[i](j, k);
        double A[3][3] = {{gx.x[i](j, k), gx.y[i](j, k), gx.z[i](j, k)},
                          {gy.x[i](j, k), gy.y[i](j, k), gy.z[i](j, k)},
                          {gz.x[i](j, k), gz.y[i](j, k), gz.z[i](j, k)}};
        double gsq = 0.0, ssq = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            gsq += A[a][b] * A[a][b];
            const double s = A[a][b] + A[b][a];
            ssq += s * s;
          }
        rep.energy += q * usq;
        rep.grad_norm_sq += q * gsq;
        rep.stress_norm_sq += q * ssq;
      }
    }
  }
  return rep;
}

double shell_l2_norm(const ShellField& u) {
  const ShellGeometry& geom = *u.geom;
  const GaussGrid& g = *geom.surface();
  const double dphi = 2.0 * kPi / g.nlon();
  double s = 0.0;
  for (int i = 0; i < geom.nr(); ++i) {
    const double vw = geom.volume_weight(i);
    for (int j = 0; j < g.nlat(); ++j)
      s += vw * g.weight(j) * dphi *
           (u.w[i].row(j) * u.w[i].row(j) +
            u.u_theta[i].row(j) * u.u_theta[i].row(j) +
            u.u_phi[i].row(j) * u.u_phi[i].row(j))
               .sum();
  }
  return std::sqrt(std::max(0.0, s));
}

double shell_scalar_l2_norm(const ShellScalar& f) {
  const ShellGeometry& geom = *f.geom;
  const GaussGrid& g = *geom.surface();
  const double dphi = 2.0 * kPi / g.nlon();
  double s = 0.0;
  for (int i = 0; i < geom.nr(); ++i) {
    const double vw = geom.volume_weight(i);
    for (int j = 0; j < g.nlat(); ++j)
      s += vw * g.weight(j) * dphi *
           (f.level[i].row(j) * f.level[i].row(j)).sum();
  }
  return std::sqrt(std::max(0.0, s));
}

}  // namespace rotwave
