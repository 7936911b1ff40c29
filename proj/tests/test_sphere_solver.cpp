#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "rotwave/errors.hpp"
#include "rotwave/sphere_solver.hpp"
#include "support/test_rng.hpp"

using namespace rotwave;
using rotwave::testing::random_divfree;

namespace {

// real-basis index map over conjugate-symmetric stream coefficients
struct RealBasis {
  int lmax, dim;
  explicit RealBasis(int L) : lmax(L) {
    dim = 0;
    for (int l = 1; l <= L; ++l) dim += 2 * l + 1;
  }
  // column index of the (l, m>=0, re/im) degree of freedom
  int col(int l, int m, bool imag) const {
    int c = 0;
    for (int lp = 1; lp < l; ++lp) c += 2 * lp + 1;
    if (m == 0) return c;
    return c + 1 + 2 * (m - 1) + (imag ? 1 : 0);
  }
  Eigen::VectorXd pack(const SpectralScalar& psi) const {
    Eigen::VectorXd v(dim);
    for (int l = 1; l <= lmax; ++l) {
      v[col(l, 0, false)] = psi.at(l, 0).real();
      for (int m = 1; m <= l; ++m) {
        v[col(l, m, false)] = psi.at(l, m).real();
        v[col(l, m, true)] = psi.at(l, m).imag();
      }
    }
    return v;
  }
  SpectralScalar unpack(const Eigen::VectorXd& v) const {
    SpectralScalar psi(lmax);
    for (int l = 1; l <= lmax; ++l) {
      psi.at(l, 0) = v[col(l, 0, false)];
      for (int m = 1; m <= l; ++m) {
        Complex c(v[col(l, m, false)], v[col(l, m, true)]);
        psi.at(l, m) = c;
        psi.at(l, -m) = ((m % 2) ? -1.0 : 1.0) * std::conj(c);
      }
    }
    return psi;
  }
};

}  // namespace

TEST_CASE("config validation") {
  RunConfig bad;
  bad.epsilon = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = RunConfig{};
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = RunConfig{};
  bad.T = 1e-4;
  bad.dt = 1e-3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("init_state: determinism, normalization, band limits") {
  RunConfig cfg;
  cfg.lmax = 15;
  cfg.seed = 1;
  SphereSolver solver(cfg);
  SphereState a = solver.init_state();
  SphereState b = solver.init_state();
  CHECK((a.zeta.coeffs() - b.zeta.coeffs()).norm() == 0.0);

  CHECK(std::sqrt(a.energy()) == doctest::Approx(1.0).epsilon(1e-10));

  for (int l = 1; l <= 15; ++l)
    for (int m = -l; m <= l; ++m) {
      if (l >= 2 && l <= 7) continue;
      CHECK(std::abs(a.zeta.at(l, m)) == 0.0);
    }
}

TEST_CASE("zonal states are steady") {
  RunConfig cfg;
  cfg.lmax = 15;
  cfg.mu = 0.0;
  cfg.epsilon = 0.05;
  SphereSolver solver(cfg);
  SphereState s = solver.init_state();
  s.zeta = SpectralScalar(15);
  for (int l = 1; l <= 6; ++l) s.zeta.at(l, 0) = 1.0 / (1.0 + l);
  SpectralScalar z0 = s.zeta;
  for (int n = 0; n < 50; ++n) solver.step(s, 1e-3);
  CHECK((s.zeta.coeffs() - z0.coeffs()).cwiseAbs().maxCoeff() < 1e-10);
  // and the running integral stays zonal
  CHECK(zonal_defect(s.time_integral(), -4.0) < 1e-12);
}

TEST_CASE("viscous energy decreases per step") {
  RunConfig cfg;
  cfg.lmax = 12;
  cfg.mu = 0.05;
  cfg.epsilon = 0.1;
  cfg.seed = 3;
  SphereSolver solver(cfg);
  SphereState s = solver.init_state();
  double prev = s.energy();
  for (int n = 0; n < 100; ++n) {
    solver.step(s, 2e-3);
    double e = s.energy();
    CHECK(e <= prev * (1.0 + 1e-12));
    prev = e;
  }
}

TEST_CASE("linearized flow matches a dense exponential built from apply_Lh") {
  const int L = 5;
  RunConfig cfg;
  cfg.lmax = L;
  cfg.epsilon = 0.07;
  cfg.mu = 0.0;
  cfg.nonlinear = false;
  cfg.seed = 11;
  SphereSolver solver(cfg);

  // dense matrix of L_h on the real stream-coefficient basis, built through
  // the grid route (independent of the solver's analytic diagonal)
  auto grid = GaussGrid::build(L + 1);
  RealBasis basis(L);
  Eigen::MatrixXd A(basis.dim, basis.dim);
  for (int l = 1; l <= L; ++l)
    for (int m = 0; m <= l; ++m)
      for (int im = 0; im < (m == 0 ? 1 : 2); ++im) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(basis.dim);
        e[basis.col(l, m, im == 1)] = 1.0;
        TangentField u(L);
        u.hodge_psi = basis.unpack(e);
        TangentField lu = apply_Lh(u, grid);
        A.col(basis.col(l, m, im == 1)) = basis.pack(lu.hodge_psi);
      }

  SphereState s = solver.init_state();
  SpectralScalar psi0 = invert_laplace(s.zeta);
  const double T = 0.3;
  const int nsteps = 150;
  for (int n = 0; n < nsteps; ++n) solver.step(s, T / nsteps);

  Eigen::MatrixXd P = (A * (T / cfg.epsilon)).exp();
  SpectralScalar psi_oracle = basis.unpack(P * basis.pack(psi0));
  SpectralScalar psi_solver = invert_laplace(s.zeta);
  CHECK((psi_oracle.coeffs() - psi_solver.coeffs()).cwiseAbs().maxCoeff() <
        1e-11);

  // phase c*eps invariance: scaling eps by c reparametrizes time by 1/c
  RunConfig cfg2 = cfg;
  cfg2.epsilon = cfg.epsilon * 2.0;
  SphereSolver solver2(cfg2);
  SphereState s2 = solver2.init_state();
  for (int n = 0; n < nsteps; ++n) solver2.step(s2, 2.0 * T / nsteps);
  CHECK((s2.zeta.coeffs() - s.zeta.coeffs()).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("run_accumulate basics") {
  RunConfig cfg;
  cfg.lmax = 15;
  cfg.epsilon = 0.05;
  cfg.T = 0.0;
  SphereSolver solver(cfg);
  RunRecord rec = solver.run_accumulate();
  CHECK(vector_sobolev_norm(rec.time_integral, 0.0) == 0.0);

  cfg.T = 1.0;
  cfg.dt = 2e-3;
  cfg.seed = 5;
  RunRecord r = run_accumulate(cfg);
  // inviscid energy conservation
  CHECK(std::abs(r.energy_final - r.energy_initial) / r.energy_initial <
        1e-6);
  // integrator/accumulator consistency
  CHECK(r.wave_identity_residual < 1e-8);
  // defect bound chain at every snapshot
  for (const SolverSnapshot& snap : r.history)
    CHECK(snap.zonal_defect <= snap.lh_integral_norm + 1e-8);
}

TEST_CASE("zonal initial data keeps the time integral zonal") {
  RunConfig cfg;
  cfg.lmax = 15;
  cfg.epsilon = 0.1;
  cfg.T = 0.5;
  cfg.dt = 2e-3;
  SphereSolver solver(cfg);
  SphereState s = solver.init_state();
  s.zeta = SpectralScalar(15);
  for (int l = 2; l <= 5; ++l) s.zeta.at(l, 0) = 0.5;
  const int nsteps = 250;
  for (int n = 0; n < nsteps; ++n) solver.step(s, cfg.T / nsteps);
  CHECK(zonal_defect(s.time_integral(), -4.0) < 1e-9);
}

TEST_CASE("zonal_defect against a grid-level oracle") {
  // purely zonal: zero
  TangentField zon(10);
  zon.hodge_psi.at(3, 0) = 2.0;
  CHECK(zonal_defect(zon, -2.0) == 0.0);

  // purely non-zonal: projector removes nothing
  TangentField nz(10);
  nz.hodge_psi.at(1, 1) = 1.0;
  nz.hodge_psi.at(1, -1) = -1.0;
  CHECK(zonal_defect(nz, -4.0) ==
        doctest::Approx(vector_sobolev_norm(nz, -4.0)));

  // mixed field: compare against removing the phi-average on the grid
  auto g = GaussGrid::build(10);
  TangentField u = random_divfree(10, 99u);
  GridTangent ug = synthesize_tangent(u, g);
  GridTangent nonzonal(g);
  nonzonal.u_theta = ug.u_theta;
  for (int j = 0; j < g->nlat(); ++j)
    nonzonal.u_phi.row(j) = ug.u_phi.row(j) - ug.u_phi.row(j).mean();
  TangentField h = hodge_decompose(nonzonal);
  const double alpha = -3.0;
  CHECK(zonal_defect(u, alpha) ==
        doctest::Approx(vector_sobolev_norm(h, alpha)).epsilon(1e-9));
}

TEST_CASE("dt convergence of the zonal defect") {
  RunConfig cfg;
  cfg.lmax = 21;
  cfg.epsilon = 0.025;
  cfg.T = 1.0;
  cfg.seed = 0;
  cfg.dt = 4e-3;
  double d1 = run_accumulate(cfg).zonal_defect;
  cfg.dt = 2e-3;
  double d2 = run_accumulate(cfg).zonal_defect;
  CHECK(std::abs(d1 - d2) / d2 < 0.01);
}

TEST_CASE("blow-up detection") {
  RunConfig cfg;
  cfg.lmax = 15;
  cfg.epsilon = 0.1;
  cfg.M0 = 50.0;  // huge amplitude, step far beyond the CFL bound
  SphereSolver solver(cfg);
  SphereState s = solver.init_state();
  CHECK(solver.stable_dt(s) < 0.05);
  CHECK_THROWS_AS(
      [&] {
        for (int n = 0; n < 200; ++n) solver.step(s, 0.05);
      }(),
      NumericFailure);
}

TEST_CASE("forced run reports M_ext") {
  RunConfig cfg;
  cfg.lmax = 12;
  cfg.epsilon = 0.1;
  cfg.T = 0.2;
  cfg.dt = 2e-3;
  ForcingSpec f;
  f.amplitude = 0.3;
  f.seed = 2;
  cfg.forcing = f;
  RunRecord r = run_accumulate(cfg);
  CHECK(r.m_ext > 0.0);
  CHECK(r.wave_identity_residual < 1e-8);
}
