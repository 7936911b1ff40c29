#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rotwave/sphere_ops.hpp"
#include "support/test_rng.hpp"

using namespace rotwave;
using rotwave::testing::random_divfree;
using rotwave::testing::random_scalar;
using rotwave::testing::random_tangent;

namespace {
constexpr double kPi = 3.14159265358979323846;

// grid-level longitude average of the e_phi component, the definition of the
// zonal projector, used as the independent oracle
GridTangent zonal_oracle(const GridTangent& u) {
  GridTangent out(u.grid);
  for (int j = 0; j < u.grid->nlat(); ++j) {
    double mean = u.u_phi.row(j).mean();
    out.u_phi.row(j).setConstant(mean);
  }
  return out;
}
}  // namespace

TEST_CASE("surface_grad of Y_1^0") {
  auto g = GaussGrid::build(8);
  SpectralScalar f(8);
  f.at(1, 0) = 1.0;
  auto [grad, perp] = surface_grad(f, g);
  const double n10 = std::sqrt(3.0 / (4.0 * kPi));
  for (int j = 0; j < g->nlat(); ++j) {
    const double expect = -n10 * g->sin_colat(j);
    for (int k = 0; k < g->nlon(); ++k) {
      CHECK(std::abs(grad.u_theta(j, k) - expect) < 1e-13);
      CHECK(std::abs(grad.u_phi(j, k)) < 1e-13);
      CHECK(std::abs(perp.u_phi(j, k) - expect) < 1e-13);
      CHECK(std::abs(perp.u_theta(j, k)) < 1e-13);
    }
  }
}

TEST_CASE("surface_grad of zero and pointwise orthogonality") {
  auto g = GaussGrid::build(15);
  SpectralScalar zero(15);
  auto [gz, pz] = surface_grad(zero, g);
  CHECK(gz.u_theta.abs().maxCoeff() == 0.0);
  CHECK(pz.u_phi.abs().maxCoeff() == 0.0);

  SpectralScalar f = random_scalar(15, 11u);
  auto [grad, perp] = surface_grad(f, g);
  CHECK(std::abs(tangent_inner(grad, perp)) < 1e-11);
}

TEST_CASE("surface_divcurl on pure Hodge components") {
  auto g = GaussGrid::build(15);
  SpectralScalar psi = random_scalar(15, 5u);
  auto [grad, perp] = surface_grad(psi, g);

  auto [div_p, curl_p] = surface_divcurl(perp);
  CHECK(div_p.coeffs().cwiseAbs().maxCoeff() < 1e-11);
  SpectralScalar lap = laplace_beltrami(psi);
  CHECK((curl_p.coeffs() - lap.coeffs()).cwiseAbs().maxCoeff() < 1e-11);

  auto [div_g, curl_g] = surface_divcurl(grad);
  CHECK(curl_g.coeffs().cwiseAbs().maxCoeff() < 1e-11);
  CHECK((div_g.coeffs() - lap.coeffs()).cwiseAbs().maxCoeff() < 1e-11);

  GridTangent zero(g);
  auto [dz, cz] = surface_divcurl(zero);
  CHECK(dz.coeffs().norm() == 0.0);
  CHECK(cz.coeffs().norm() == 0.0);
}

TEST_CASE("hodge_decompose recovers potentials and reconstructs") {
  auto g = GaussGrid::build(15);

  SpectralScalar y21(15);
  y21.at(2, 1) = Complex(0.3, -0.4);
  y21.at(2, -1) = -std::conj(Complex(0.3, -0.4));
  auto [grad, perp] = surface_grad(y21, g);
  TangentField h1 = hodge_decompose(grad);
  CHECK((h1.hodge_phi.coeffs() - y21.coeffs()).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(h1.hodge_psi.coeffs().cwiseAbs().maxCoeff() < 1e-11);

  SpectralScalar y30(15);
  y30.at(3, 0) = 1.0;
  auto [g30, p30] = surface_grad(y30, g);
  TangentField h2 = hodge_decompose(p30);
  CHECK((h2.hodge_psi.coeffs() - y30.coeffs()).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(h2.hodge_phi.coeffs().cwiseAbs().maxCoeff() < 1e-11);

  // random reconstruction
  TangentField u = random_tangent(15, 9u);
  GridTangent ug = synthesize_tangent(u, g);
  TangentField back = hodge_decompose(ug);
  GridTangent rec = synthesize_tangent(back, g);
  GridTangent diff(g);
  diff.u_theta = rec.u_theta - ug.u_theta;
  diff.u_phi = rec.u_phi - ug.u_phi;
  CHECK(tangent_l2_norm(diff) < 1e-9);

  // P_h and Q_h parts are L2-orthogonal and P_h^2 = P_h
  TangentField p_part(15), q_part(15);
  p_part.hodge_psi = back.hodge_psi;
  q_part.hodge_phi = back.hodge_phi;
  GridTangent pg = synthesize_tangent(p_part, g);
  GridTangent qg = synthesize_tangent(q_part, g);
  CHECK(std::abs(tangent_inner(pg, qg)) < 1e-10);
  TangentField pp = hodge_decompose(pg);
  CHECK((pp.hodge_psi.coeffs() - p_part.hodge_psi.coeffs()).cwiseAbs().maxCoeff() <
        1e-11);
  CHECK(pp.hodge_phi.coeffs().cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("P_h kills gradients") {
  auto g = GaussGrid::build(15);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SpectralScalar f = random_scalar(15, seed + 60);
    auto [grad, perp] = surface_grad(f, g);
    TangentField h = hodge_decompose(grad);
    TangentField rot(15);
    rot.hodge_psi = h.hodge_psi;
    CHECK(tangent_l2_norm(synthesize_tangent(rot, g)) < 1e-10);
  }
}

TEST_CASE("zonal projector") {
  auto g = GaussGrid::build(15);

  // already zonal: unchanged
  TangentField zon(15);
  zon.hodge_psi.at(2, 0) = 1.0;
  zon.hodge_psi.at(5, 0) = -0.7;
  GridTangent zg = synthesize_tangent(zon, g);
  GridTangent pz = zonal_project(zon, g);
  CHECK((pz.u_phi - zg.u_phi).abs().maxCoeff() < 1e-12);
  CHECK(pz.u_theta.abs().maxCoeff() < 1e-12);

  // pure g(theta) e_theta: projects to zero.  g(theta) e_theta = grad of a
  // zonal potential, so build from hodge_phi with m=0.
  TangentField merid(15);
  merid.hodge_phi.at(3, 0) = 1.0;
  GridTangent pm = zonal_project(merid, g);
  CHECK(pm.u_theta.abs().maxCoeff() < 1e-12);
  CHECK(pm.u_phi.abs().maxCoeff() < 1e-12);

  // u = sin(theta)cos(phi) e_phi -> phi-average kills it
  GridTangent uw(g);
  for (int j = 0; j < g->nlat(); ++j)
    for (int k = 0; k < g->nlon(); ++k)
      uw.u_phi(j, k) = g->sin_colat(j) * std::cos(g->lon(k));
  TangentField uh = hodge_decompose(uw);
  GridTangent puw = zonal_project(uh, g);
  CHECK(puw.u_phi.abs().maxCoeff() < 1e-12);
  GridTangent oracle = zonal_oracle(uw);
  CHECK(oracle.u_phi.abs().maxCoeff() < 1e-12);

  // random mixed field: spectral projector equals the grid-level average
  TangentField u = random_tangent(15, 21u);
  GridTangent ugrid = synthesize_tangent(u, g);
  GridTangent spectral = zonal_project(u, g);
  GridTangent brute = zonal_oracle(ugrid);
  CHECK((spectral.u_phi - brute.u_phi).abs().maxCoeff() < 1e-11);
  CHECK(spectral.u_theta.abs().maxCoeff() < 1e-12);

  // idempotent + orthogonal split
  TangentField zpart = zonal_part(u);
  TangentField npart = nonzonal_part(u);
  GridTangent zg2 = synthesize_tangent(zpart, g);
  TangentField zz = hodge_decompose(zg2);
  CHECK((zz.hodge_psi.coeffs() - zpart.hodge_psi.coeffs()).cwiseAbs().maxCoeff() <
        1e-11);
  CHECK(std::abs(tangent_inner(zg2, synthesize_tangent(npart, g))) < 1e-10);
}

TEST_CASE("apply_Lh annihilates zonal stream flows") {
  auto g = GaussGrid::build(17);  // headroom for lmax 16
  // f(z) = z^2 is a combination of Y_0^0 and Y_2^0; perp-grad of its
  // zero-mean part is a zonal flow in ker L_h.
  TangentField u(16);
  u.hodge_psi.at(2, 0) = 0.8;
  TangentField lu = apply_Lh(u, g);
  CHECK(vector_sobolev_norm(lu, 0.0) < 1e-12);

  // polynomial f(z) up to degree 6: all zonal, all annihilated
  TangentField upoly(16);
  for (int l = 1; l <= 6; ++l) upoly.hodge_psi.at(l, 0) = 1.0 / (1.0 + l);
  CHECK(vector_sobolev_norm(apply_Lh(upoly, g), 0.0) < 1e-8);

  // non-zonal mode is not annihilated
  TangentField v(16);
  v.hodge_psi.at(1, 1) = 1.0;
  v.hodge_psi.at(1, -1) = -1.0;
  CHECK(vector_sobolev_norm(apply_Lh(v, g), 0.0) > 0.1);

  TangentField zero(16);
  CHECK(vector_sobolev_norm(apply_Lh(zero, g), 0.0) == 0.0);

  // non-divergence-free input rejected
  TangentField bad(16);
  bad.hodge_phi.at(2, 0) = 1.0;
  CHECK_THROWS_AS(apply_Lh(bad, g), std::invalid_argument);
}

TEST_CASE("apply_Lh matches the diagonal stream-function formula") {
  auto g = GaussGrid::build(13);
  TangentField u = random_divfree(12, 31u);
  TangentField lu = apply_Lh(u, g);
  // L_h (perp grad Psi) = perp grad of (im/(l(l+1))) psi_lm
  for (int l = 1; l <= 12; ++l)
    for (int m = -l; m <= l; ++m) {
      Complex expect =
          Complex(0.0, double(m) / (double(l) * (l + 1))) * u.hodge_psi.at(l, m);
      CHECK(std::abs(lu.hodge_psi.at(l, m) - expect) < 1e-12);
    }
}

TEST_CASE("L_h is skew-adjoint") {
  auto g = GaussGrid::build(13);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    TangentField u = random_divfree(12, seed + 300);
    TangentField v = random_divfree(12, seed + 700);
    GridTangent ug = synthesize_tangent(u, g);
    GridTangent vg = synthesize_tangent(v, g);
    GridTangent lug = synthesize_tangent(apply_Lh(u, g), g);
    GridTangent lvg = synthesize_tangent(apply_Lh(v, g), g);
    double a = tangent_inner(lug, vg);
    double b = tangent_inner(ug, lvg);
    CHECK(std::abs(a + b) < 1e-10);
    CHECK(std::abs(tangent_inner(lug, ug)) < 1e-10);
  }
}

TEST_CASE("Lemma 5.2 bound: nonzonal part controlled by L_h") {
  auto g = GaussGrid::build(16);
  for (double alpha : {-4.5, -2.0, 0.0}) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      TangentField u = random_divfree(15, seed + 1000);
      double lhs = vector_sobolev_norm(nonzonal_part(u), alpha);
      double rhs = vector_sobolev_norm(apply_Lh(u, g), alpha + 2.0);
      CHECK(lhs <= rhs + 1e-9);
    }
  }
}

TEST_CASE("vector Sobolev norm values") {
  TangentField u(4);
  u.hodge_psi.at(1, 0) = 1.0;
  CHECK(vector_sobolev_norm(u, 0.0) == doctest::Approx(std::sqrt(2.0)));

  TangentField v(4);
  v.hodge_psi.at(2, 0) = 1.0;
  CHECK(vector_sobolev_norm(v, -4.0) == doctest::Approx(std::pow(6.0, -1.5)));

  TangentField zero(4);
  CHECK(vector_sobolev_norm(zero, -1.0) == 0.0);

  // vector H^0 norm equals the grid L2 norm
  auto g = GaussGrid::build(12);
  TangentField w = random_tangent(12, 77u);
  double spec = vector_sobolev_norm(w, 0.0);
  double quad = tangent_l2_norm(synthesize_tangent(w, g));
  CHECK(spec == doctest::Approx(quad).epsilon(1e-10));
}
