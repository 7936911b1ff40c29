#include "rotwave/mhd.hpp"

#include <cmath>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>

#include <fftw3.h>

#include "rotwave/errors.hpp"

namespace rotwave {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double uniform01(std::mt19937_64& rng) {
  return std::ldexp(double(rng() >> 11), -53);
}

double gaussian(std::mt19937_64& rng) {
  double u1 = 0.0;
  while (u1 == 0.0) u1 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * uniform01(rng));
}

using Mat6 = Eigen::Matrix<Complex, 6, 6>;
using Vec6 = Eigen::Matrix<Complex, 6, 1>;

// skew-Hermitian wave-operator block at wavevector k
Mat6 wave_block(const int k[3]) {
  Mat6 M = Mat6::Zero();
  const double k2 =
      double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
  if (k2 == 0.0) return M;
  const double kz = k[2];
  Eigen::Matrix3d cross;
  cross << 0, -k[2], k[1], k[2], 0, -k[0], -k[1], k[0], 0;
  M.topLeftCorner<3, 3>() = (-kz / k2) * cross.cast<Complex>();
  M.topRightCorner<3, 3>() =
      Complex(0, kz) * Eigen::Matrix3cd::Identity();
  M.bottomLeftCorner<3, 3>() =
      Complex(0, kz) * Eigen::Matrix3cd::Identity();
  return M;
}

}  // namespace

struct BoxGrid::Plans {
  fftw_plan fwd = nullptr, bwd = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lk(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

std::shared_ptr<const BoxGrid> BoxGrid::build(int n) {
  if (n < 8 || n % 2 != 0)
    throw std::invalid_argument("BoxGrid: n must be even and >= 8");
  return std::shared_ptr<const BoxGrid>(new BoxGrid(n));
}

BoxGrid::BoxGrid(int n) : n_(n) {
  const int cut = n_ / 3;
  for (int ix = 0; ix < n_; ++ix) {
    const int kx = ix <= n_ / 2 ? ix : ix - n_;
    for (int iy = 0; iy < n_; ++iy) {
      const int ky = iy <= n_ / 2 ? iy : iy - n_;
      for (int iz = 0; iz <= n_ / 2; ++iz) {
        if (std::abs(kx) > cut || std::abs(ky) > cut || iz > cut) continue;
        if (kx == 0 && ky == 0 && iz == 0) continue;
        masked_.push_back(index(ix, iy, iz));
      }
    }
  }
  plans_ = std::make_unique<Plans>();
  std::lock_guard<std::mutex> lk(planner_mutex());
  std::vector<double> rbuf(static_cast<size_t>(nreal()));
  std::vector<fftw_complex> cbuf(static_cast<size_t>(ncomplex()));
  plans_->fwd = fftw_plan_dft_r2c_3d(n_, n_, n_, rbuf.data(), cbuf.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans_->bwd = fftw_plan_dft_c2r_3d(n_, n_, n_, cbuf.data(), rbuf.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
}

BoxGrid::~BoxGrid() = default;

void BoxGrid::wavevector(int idx, int k[3]) const {
  const int nzh = n_ / 2 + 1;
  const int iz = idx % nzh;
  const int iy = (idx / nzh) % n_;
  const int ix = idx / (nzh * n_);
  k[0] = ix <= n_ / 2 ? ix : ix - n_;
  k[1] = iy <= n_ / 2 ? iy : iy - n_;
  k[2] = iz;
}

double BoxGrid::mult(int idx) const {
  const int iz = idx % (n_ / 2 + 1);
  return (iz == 0 || iz == n_ / 2) ? 1.0 : 2.0;
}

void BoxGrid::forward(const Eigen::VectorXd& real,
                      Eigen::VectorXcd& spec) const {
  spec.resize(ncomplex());
  fftw_execute_dft_r2c(plans_->fwd, const_cast<double*>(real.data()),
                       reinterpret_cast<fftw_complex*>(spec.data()));
}

void BoxGrid::backward(const Eigen::VectorXcd& spec,
                       Eigen::VectorXd& real) const {
  Eigen::VectorXcd copy = spec;  // c2r destroys its input
  real.resize(nreal());
  fftw_execute_dft_c2r(plans_->bwd,
                       reinterpret_cast<fftw_complex*>(copy.data()),
                       real.data());
}

void MhdConfig::validate() const {
  if (n < 8 || n % 2) throw std::invalid_argument("MhdConfig: bad n");
  if (!(epsilon > 0)) throw std::invalid_argument("MhdConfig: epsilon > 0");
  if (!(dt > 0)) throw std::invalid_argument("MhdConfig: dt > 0");
  if (T < 0) throw std::invalid_argument("MhdConfig: T >= 0");
  if (k < 3) throw std::invalid_argument("MhdConfig: k >= 3 (paper: k > 5/2)");
  if (!(s > 6)) throw std::invalid_argument("MhdConfig: s > 6");
  if (init_kmax < 1) throw std::invalid_argument("MhdConfig: init_kmax >= 1");
  if (hyper_nu < 0) throw std::invalid_argument("MhdConfig: hyper_nu >= 0");
}

double MhdState::divergence_residual() const {
  double worst = 0.0;
  int k[3];
  for (int idx : grid->masked()) {
    grid->wavevector(idx, k);
    Complex du = double(k[0]) * u.c[0][idx] + double(k[1]) * u.c[1][idx] +
                 double(k[2]) * u.c[2][idx];
    Complex db = double(k[0]) * b.c[0][idx] + double(k[1]) * b.c[1][idx] +
                 double(k[2]) * b.c[2][idx];
    worst = std::max({worst, std::abs(du), std::abs(db)});
  }
  return worst;
}

double MhdState::energy() const {
  double e = 0.0;
  for (int idx : grid->masked()) {
    const double m = grid->mult(idx);
    for (int c = 0; c < 3; ++c)
      e += m * (std::norm(u.c[c][idx]) + std::norm(b.c[c][idx]));
  }
  return e * std::pow(kTwoPi, 3);
}

void project_leray_box(const BoxGrid& g, Field3& v) {
  int k[3];
  for (int idx : g.masked()) {
    g.wavevector(idx, k);
    const double k2 =
        double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    Complex dot = double(k[0]) * v.c[0][idx] + double(k[1]) * v.c[1][idx] +
                  double(k[2]) * v.c[2][idx];
    for (int c = 0; c < 3; ++c) v.c[c][idx] -= double(k[c]) * dot / k2;
  }
}

std::pair<Field3, Field3> apply_wave_operator(const MhdState& s) {
  const BoxGrid& g = *s.grid;
  Field3 lu(s.grid), lb(s.grid);
  int k[3];
  for (int idx : g.masked()) {
    g.wavevector(idx, k);
    Vec6 y;
    for (int c = 0; c < 3; ++c) {
      y[c] = s.u.c[c][idx];
      y[c + 3] = s.b.c[c][idx];
    }
    Vec6 z = wave_block(k) * y;
    for (int c = 0; c < 3; ++c) {
      lu.c[c][idx] = z[c];
      lb.c[c][idx] = z[c + 3];
    }
  }
  return {std::move(lu), std::move(lb)};
}

MhdSolver::MhdSolver(MhdConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  grid_ = BoxGrid::build(cfg_.n);
}

MhdState MhdSolver::init_state() const {
  const BoxGrid& g = *grid_;
  MhdState s;
  s.grid = grid_;
  s.epsilon = cfg_.epsilon;
  s.t = 0.0;
  s.u = Field3(grid_);
  s.b = Field3(grid_);
  s.accum_u = Field3(grid_);
  s.accum_b = Field3(grid_);
  s.accum_nl_u = Field3(grid_);
  s.accum_nl_b = Field3(grid_);

  // white real fields, spectrally filtered to the shell 1 <= |xi| <= kmax
  std::mt19937_64 rng(cfg_.seed);
  Eigen::VectorXd grid_vals(g.nreal());
  const double kmax2 = double(cfg_.init_kmax) * cfg_.init_kmax;
  int k[3];
  for (Field3* f : {&s.u, &s.b}) {
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < g.nreal(); ++i) grid_vals[i] = gaussian(rng);
      Eigen::VectorXcd spec;
      g.forward(grid_vals, spec);
      Eigen::VectorXcd filtered = Eigen::VectorXcd::Zero(g.ncomplex());
      for (int idx : g.masked()) {
        g.wavevector(idx, k);
        const double k2 =
            double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
        if (k2 >= 1.0 && k2 <= kmax2)
          filtered[idx] = spec[idx] / double(g.nreal());
      }
      f->c[c] = std::move(filtered);
    }
    project_leray_box(g, *f);
  }

  // normalize |(u,b)|_{H^k} = M0
  double h = 0.0;
  for (const Field3* f : {&s.u, &s.b})
    for (int idx : g.masked()) {
      g.wavevector(idx, k);
      const double k2 =
          double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
      const double w = g.mult(idx) * std::pow(1.0 + k2, cfg_.k);
      for (int c = 0; c < 3; ++c) h += w * std::norm(f->c[c][idx]);
    }
  h = std::sqrt(h * std::pow(kTwoPi, 3));
  const double scale = cfg_.M0 / h;
  for (Field3* f : {&s.u, &s.b})
    for (int c = 0; c < 3; ++c) f->c[c] *= scale;
  return s;
}

std::pair<Field3, Field3> MhdSolver::nonlinear_term(const Field3& u,
                                                    const Field3& b) const {
  const BoxGrid& g = *grid_;
  Field3 nu(grid_), nb(grid_);
  if (!cfg_.nonlinear) return {std::move(nu), std::move(nb)};

  Field3 om = curl(g, u);
  Field3 jj = curl(g, b);

  std::array<Eigen::VectorXd, 3> ug, bg, omg, jg;
  for (int c = 0; c < 3; ++c) {
    g.backward(u.c[c], ug[c]);
    g.backward(b.c[c], bg[c]);
    g.backward(om.c[c], omg[c]);
    g.backward(jj.c[c], jg[c]);
  }

  // a = j x b - omega x u (u slot, rotational form), p = u x b (b slot)
  std::array<Eigen::VectorXd, 3> a, p;
  for (int c = 0; c < 3; ++c) {
    a[c].resize(g.nreal());
    p[c].resize(g.nreal());
  }
  for (int i = 0; i < g.nreal(); ++i) {
    const double jv[3] = {jg[0][i], jg[1][i], jg[2][i]};
    const double bv[3] = {bg[0][i], bg[1][i], bg[2][i]};
    const double ov[3] = {omg[0][i], omg[1][i], omg[2][i]};
    const double uv[3] = {ug[0][i], ug[1][i], ug[2][i]};
    a[0][i] = jv[1] * bv[2] - jv[2] * bv[1] - (ov[1] * uv[2] - ov[2] * uv[1]);
    a[1][i] = jv[2] * bv[0] - jv[0] * bv[2] - (ov[2] * uv[0] - ov[0] * uv[2]);
    a[2][i] = jv[0] * bv[1] - jv[1] * bv[0] - (ov[0] * uv[1] - ov[1] * uv[0]);
    p[0][i] = uv[1] * bv[2] - uv[2] * bv[1];
    p[1][i] = uv[2] * bv[0] - uv[0] * bv[2];
    p[2][i] = uv[0] * bv[1] - uv[1] * bv[0];
  }

  Field3 ahat(grid_), phat(grid_);
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXcd spec;
    g.forward(a[c], spec);
    for (int idx : g.masked()) ahat.c[c][idx] = spec[idx] / double(g.nreal());
    g.forward(p[c], spec);
    for (int idx : g.masked()) phat.c[c][idx] = spec[idx] / double(g.nreal());
  }
  project_leray_box(g, ahat);
  nu = std::move(ahat);
  nb = curl(g, phat);
  return {std::move(nu), std::move(nb)};
}

void MhdSolver::ensure_propagators(double dt) {
  if (cached_dt_ == dt) return;
  const BoxGrid& g = *grid_;
  const size_t nm = g.masked().size();
  e_half_.resize(nm);
  e_full_.resize(nm);
  s_half_.resize(nm);
  s_full_.resize(nm);
  int k[3];
  for (size_t i = 0; i < nm; ++i) {
    g.wavevector(g.masked()[i], k);
    const double k2 =
        double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    Mat6 M = wave_block(k);
    // i M is Hermitian; one diagonalization gives both exp and its integral
    Eigen::SelfAdjointEigenSolver<Mat6> es(Complex(0, 1) * M);
    const Eigen::Matrix<double, 6, 1> d = es.eigenvalues();
    const Mat6 V = es.eigenvectors();
    const double damp = cfg_.hyper_nu * k2 * k2;
    auto make = [&](double t, Mat6& e, Mat6& s) {
      Eigen::Matrix<Complex, 6, 1> ev, sv;
      for (int j = 0; j < 6; ++j) {
        const Complex lam(-damp, -d[j] / cfg_.epsilon);
        ev[j] = std::exp(lam * t);
        if (std::abs(lam) * t < 1e-8)
          sv[j] = t * (1.0 + lam * t / 2.0);
        else
          sv[j] = (std::exp(lam * t) - 1.0) / lam;
      }
      e = V * ev.asDiagonal() * V.adjoint();
      s = V * sv.asDiagonal() * V.adjoint();
    };
    make(dt / 2.0, e_half_[i], s_half_[i]);
    make(dt, e_full_[i], s_full_[i]);
  }
  cached_dt_ = dt;
}

void MhdSolver::step(MhdState& s, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("step_mhd: dt must be positive");
  ensure_propagators(dt);
  const BoxGrid& g = *grid_;
  const double e_before = s.energy();

  const std::vector<int>& mm = g.masked();
  const size_t nm = mm.size();

  auto gather = [&](const Field3& fu, const Field3& fb, size_t i) {
    Vec6 y;
    const int idx = mm[i];
    for (int c = 0; c < 3; ++c) {
      y[c] = fu.c[c][idx];
      y[c + 3] = fb.c[c][idx];
    }
    return y;
  };
  auto scatter = [&](Field3& fu, Field3& fb, size_t i, const Vec6& y) {
    const int idx = mm[i];
    for (int c = 0; c < 3; ++c) {
      fu.c[c][idx] = y[c];
      fb.c[c][idx] = y[c + 3];
    }
  };

  auto [k1u, k1b] = nonlinear_term(s.u, s.b);

  Field3 y2u(grid_), y2b(grid_);
  for (size_t i = 0; i < nm; ++i) {
    Vec6 y = gather(s.u, s.b, i) + (dt / 2.0) * gather(k1u, k1b, i);
    scatter(y2u, y2b, i, e_half_[i] * y);
  }
  auto [k2u, k2b] = nonlinear_term(y2u, y2b);

  Field3 y3u(grid_), y3b(grid_);
  for (size_t i = 0; i < nm; ++i) {
    Vec6 y =
        e_half_[i] * gather(s.u, s.b, i) + (dt / 2.0) * gather(k2u, k2b, i);
    scatter(y3u, y3b, i, y);
  }
  auto [k3u, k3b] = nonlinear_term(y3u, y3b);

  Field3 y4u(grid_), y4b(grid_);
  for (size_t i = 0; i < nm; ++i) {
    Vec6 y = e_full_[i] * gather(s.u, s.b, i) +
             dt * (e_half_[i] * gather(k3u, k3b, i));
    scatter(y4u, y4b, i, y);
  }
  auto [k4u, k4b] = nonlinear_term(y4u, y4b);

  for (size_t i = 0; i < nm; ++i) {
    const Vec6 y = gather(s.u, s.b, i);
    const Vec6 n1 = gather(k1u, k1b, i), n2 = gather(k2u, k2b, i),
               n3 = gather(k3u, k3b, i), n4 = gather(k4u, k4b, i);
    Vec6 ynew = e_full_[i] * y +
                (dt / 6.0) * (e_full_[i] * n1 + 2.0 * (e_half_[i] * n2) +
                              2.0 * (e_half_[i] * n3) + n4);
    Vec6 inew = gather(s.accum_u, s.accum_b, i) + s_full_[i] * y +
                (dt / 6.0) * (s_full_[i] * n1 + 2.0 * (s_half_[i] * n2) +
                              2.0 * (s_half_[i] * n3));
    Vec6 jnew = gather(s.accum_nl_u, s.accum_nl_b, i) +
                (dt / 6.0) * (n1 + 2.0 * n2 + 2.0 * n3 + n4);
    scatter(s.u, s.b, i, ynew);
    scatter(s.accum_u, s.accum_b, i, inew);
    scatter(s.accum_nl_u, s.accum_nl_b, i, jnew);
  }
  // keep per-mode exponential roundoff out of the constraint
  project_leray_box(g, s.u);
  project_leray_box(g, s.b);
  s.t += dt;

  const double e_after = s.energy();
  if (cfg_.hyper_nu == 0.0 && e_after > 1.1 * e_before + 1e-300)
    throw NumericFailure("mhd step blow-up at t = " + std::to_string(s.t) +
                         " (energy grew by " +
                         std::to_string(e_after / std::max(e_before, 1e-300)) +
                         "x)");
}

std::pair<Field3, Field3> mhd_rhs(const MhdState& s) {
  MhdConfig cfg;
  cfg.n = s.grid->n();
  cfg.epsilon = s.epsilon;
  MhdSolver solver(cfg);
  auto [nu, nb] = solver.nonlinear_term(s.u, s.b);
  auto [lu, lb] = apply_wave_operator(s);
  for (int c = 0; c < 3; ++c) {
    nu.c[c] += lu.c[c] / s.epsilon;
    nb.c[c] += lb.c[c] / s.epsilon;
  }
  return {std::move(nu), std::move(nb)};
}

MhdRunRecord run_mhd(const MhdConfig& cfg) {
  MhdSolver solver(cfg);
  const BoxGrid& g = *solver.grid();
  MhdState s = solver.init_state();
  const Field3 u0 = s.u, b0 = s.b;

  MhdRunRecord rec;
  rec.energy_initial = s.energy();

  const int nsteps = (cfg.T > 0) ? int(std::llround(cfg.T / cfg.dt)) : 0;
  const double dt = (nsteps > 0) ? cfg.T / nsteps : cfg.dt;
  for (int n = 0; n < nsteps; ++n) {
    try {
      solver.step(s, dt);
    } catch (const NumericFailure& f) {
      throw NumericFailure(std::string(f.what()) + " [run failed at step " +
                           std::to_string(n + 1) + "]");
    }
  }
  rec.energy_final = s.energy();
  rec.max_divergence = s.divergence_residual();

  MhdState tmp = s;
  tmp.u = s.accum_u;
  tmp.b = s.accum_b;
  auto [liu, lib] = apply_wave_operator(tmp);
  rec.wave_defect_hk1 =
      std::sqrt(std::pow(box_sobolev_norm(g, liu, cfg.k - 1), 2) +
                std::pow(box_sobolev_norm(g, lib, cfg.k - 1), 2));

  rec.dzu_hk1 = box_sobolev_norm(g, dz(g, s.accum_u), cfg.k - 1);
  rec.dzcurlb_hk2 = box_sobolev_norm(g, dz(g, curl(g, s.accum_b)), cfg.k - 2);

  Field3 iu_nk = nonkernel_part(g, s.accum_u);
  Field3 ib_nk = nonkernel_part(g, s.accum_b);
  rec.u_int_winf = box_winf_norm(g, iu_nk);  // W^{k-3,inf} at k = 3
  rec.b_int_wks = box_ws_norm(g, ib_nk, cfg.s);

  rec.kernel_component_l2 =
      std::sqrt(std::pow(box_l2_norm(g, kernel_part(g, s.accum_u)), 2) +
                std::pow(box_l2_norm(g, kernel_part(g, s.accum_b)), 2));

  // Hardy-Littlewood-Sobolev chain on the run output, kernel-excluded:
  // |int b|_{L^s} <= C |curl int b|_{L^2}^{2/p} |curl int b|_{L^inf}^{1-2/p},
  // 1/p = 1/3 + 1/s
  {
    const double p = 3.0 * cfg.s / (3.0 + cfg.s);
    Field3 cb = curl(g, ib_nk);
    const double rhs = std::pow(box_l2_norm(g, cb), 2.0 / p) *
                       std::pow(box_winf_norm(g, cb), 1.0 - 2.0 / p);
    rec.hls_ratio = (rhs > 0) ? rec.b_int_wks / rhs : 0.0;
  }

  // (u,b)(T) - (u,b)(0) = (1/eps) L(int u, int b) + int N dt
  {
    double num = 0.0, den = 0.0;
    for (int idx : g.masked()) {
      const double m = g.mult(idx);
      for (int c = 0; c < 3; ++c) {
        Complex ru = s.u.c[c][idx] - u0.c[c][idx] -
                     liu.c[c][idx] / cfg.epsilon - s.accum_nl_u.c[c][idx];
        Complex rb = s.b.c[c][idx] - b0.c[c][idx] -
                     lib.c[c][idx] / cfg.epsilon - s.accum_nl_b.c[c][idx];
        num += m * (std::norm(ru) + std::norm(rb));
        den += m * (std::norm(s.u.c[c][idx]) + std::norm(s.b.c[c][idx]));
      }
    }
    rec.wave_identity_residual = std::sqrt(num / std::max(den, 1e-300));
  }

  rec.int_u = std::move(s.accum_u);
  rec.int_b = std::move(s.accum_b);
  return rec;
}

// ---------------------------------------------------------------------------
// norms

double box_l2_norm(const BoxGrid& g, const Field3& f) {
  double e = 0.0;
  for (int idx : g.masked()) {
    const double m = g.mult(idx);
    for (int c = 0; c < 3; ++c) e += m * std::norm(f.c[c][idx]);
  }
  return std::sqrt(e * std::pow(kTwoPi, 3));
}

double box_sobolev_norm(const BoxGrid& g, const Field3& f, double sigma) {
  double e = 0.0;
  int k[3];
  for (int idx : g.masked()) {
    g.wavevector(idx, k);
    const double k2 =
        double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    const double w = g.mult(idx) * std::pow(1.0 + k2, sigma);
    for (int c = 0; c < 3; ++c) e += w * std::norm(f.c[c][idx]);
  }
  return std::sqrt(e * std::pow(kTwoPi, 3));
}

double box_winf_norm(const BoxGrid& g, const Field3& f) {
  std::array<Eigen::VectorXd, 3> v;
  for (int c = 0; c < 3; ++c) g.backward(f.c[c], v[c]);
  double worst = 0.0;
  for (int i = 0; i < g.nreal(); ++i)
    worst = std::max(
        worst, v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i]);
  return std::sqrt(worst);
}

double box_ws_norm(const BoxGrid& g, const Field3& f, double s) {
  std::array<Eigen::VectorXd, 3> v;
  for (int c = 0; c < 3; ++c) g.backward(f.c[c], v[c]);
  const double dv = std::pow(kTwoPi / g.n(), 3);
  double acc = 0.0;
  for (int i = 0; i < g.nreal(); ++i) {
    const double mag2 =
        v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i];
    acc += dv * std::pow(mag2, s / 2.0);
  }
  return std::pow(acc, 1.0 / s);
}

Field3 kernel_part(const BoxGrid& g, const Field3& f) {
  Field3 out;
  for (int c = 0; c < 3; ++c) out.c[c] = Eigen::VectorXcd::Zero(g.ncomplex());
  int k[3];
  for (int idx : g.masked()) {
    g.wavevector(idx, k);
    if (k[2] == 0)
      for (int c = 0; c < 3; ++c) out.c[c][idx] = f.c[c][idx];
  }
  return out;
}

Field3 nonkernel_part(const BoxGrid& g, const Field3& f) {
  Field3 out;
  for (int c = 0; c < 3; ++c) out.c[c] = Eigen::VectorXcd::Zero(g.ncomplex());
  int k[3];
  for (int idx : g.masked()) {
    g.wavevector(idx, k);
    if (k[2] != 0)
      for (int c = 0; c < 3; ++c) out.c[c][idx] = f.c[c][idx];
  }
  return out;
}

Field3 dz(const BoxGrid& g, const Field3& f) {
  Field3 out;
  for (int c = 0; c < 3; ++c) out.c[c] = Eigen::VectorXcd::Zero(g.ncomplex());
  int k[3];
  for (int idx : g.masked()) {
    g.wavevector(idx, k);
    const Complex ikz(0.0, double(k[2]));
    for (int c = 0; c < 3; ++c) out.c[c][idx] = ikz * f.c[c][idx];
  }
  return out;
}

Field3 curl(const BoxGrid& g, const Field3& f) {
  Field3 out;
  for (int c = 0; c < 3; ++c) out.c[c] = Eigen::VectorXcd::Zero(g.ncomplex());
  int k[3];
  for (int idx : g.masked()) {
    g.wavevector(idx, k);
    const Complex i(0.0, 1.0);
    out.c[0][idx] =
        i * (double(k[1]) * f.c[2][idx] - double(k[2]) * f.c[1][idx]);
    out.c[1][idx] =
        i * (double(k[2]) * f.c[0][idx] - double(k[0]) * f.c[2][idx]);
    out.c[2][idx] =
        i * (double(k[0]) * f.c[1][idx] - double(k[1]) * f.c[0][idx]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nash / anisotropic inequality checks

namespace {

// composite-Simpson |f|_inf^2 / (|f|_2 |f'|_2) for analytic (f, f')
double nash_ratio_1d(const std::function<double(double)>& f,
                     const std::function<double(double)>& df) {
  const double L = 30.0;
  const int n = 60000;
  const double h = 2.0 * L / n;
  double i2 = 0.0, d2 = 0.0, sup = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -L + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double fv = f(x), dv = df(x);
    i2 += w * fv * fv;
    d2 += w * dv * dv;
    sup = std::max(sup, std::abs(fv));
  }
  i2 *= h / 3.0;
  d2 *= h / 3.0;
  return sup * sup / (std::sqrt(i2) * std::sqrt(d2));
}

struct AnisoEntry {
  std::string name;
  std::function<double(double)> f, df;               // 1D profile
  std::function<double(double, double, double)> g;   // periodic 3D sample
  int m = 0;                                         // Sobolev order (0 or 1)
};

}  // namespace

std::vector<InequalityCheck> anisotropic_norm_checks(int n_grid) {
  std::vector<AnisoEntry> corpus;
  for (double sig : {1.0, 0.5, 2.0, 0.8, 1.5})
    corpus.push_back(
        {"gauss_" + std::to_string(sig),
         [sig](double x) { return std::exp(-x * x / (2 * sig * sig)); },
         [sig](double x) {
           return -x / (sig * sig) * std::exp(-x * x / (2 * sig * sig));
         },
         [sig](double x, double y, double z) {
           return std::exp(std::cos(x) - 1.0) * std::sin(z) *
                  std::exp(sig * (std::cos(y) - 1.0));
         },
         0});
  for (int k = 1; k <= 5; ++k)
    corpus.push_back(
        {"packet_" + std::to_string(k),
         [k](double x) { return std::exp(-x * x / 2) * std::cos(k * x); },
         [k](double x) {
           return std::exp(-x * x / 2) *
                  (-x * std::cos(k * x) - k * std::sin(k * x));
         },
         [k](double x, double y, double z) {
           return std::cos(k * x + y) * std::sin(k * z) +
                  0.3 * std::sin(x) * std::sin(2 * z);
         },
         k % 2});
  for (double sig : {1.0, 0.7, 1.4, 2.2, 0.5})
    corpus.push_back(
        {"sech_" + std::to_string(sig),
         [sig](double x) { return 1.0 / std::cosh(x / sig); },
         [sig](double x) {
           return -std::tanh(x / sig) / (sig * std::cosh(x / sig));
         },
         [sig](double x, double y, double z) {
           return std::exp(2.0 * sig * (std::cos(z - 0.3 * std::sin(x)) - 1.0)) -
                  std::exp(2.0 * sig * (std::cos(z + 0.7 * std::cos(y)) - 1.0));
         },
         0});
  for (double a : {0.5, 1.0, 1.5, 2.0, 3.0})
    corpus.push_back(
        {"twin_" + std::to_string(a),
         [a](double x) {
           return std::exp(-(x - a) * (x - a) / 2) +
                  std::exp(-(x + a) * (x + a) / 2);
         },
         [a](double x) {
           return -(x - a) * std::exp(-(x - a) * (x - a) / 2) -
                  (x + a) * std::exp(-(x + a) * (x + a) / 2);
         },
         [a](double x, double y, double z) {
           return std::sin(z) * std::cos(x) +
                  0.35 * std::sin(2 * z + y) * std::cos(a * x);
         },
         1});
  for (double q : {1.0, 2.0, 0.6, 1.3, 2.5})
    corpus.push_back(
        {"lorentz_" + std::to_string(q),
         [q](double x) { return 1.0 / (1.0 + q * x * x); },
         [q](double x) {
           const double d = 1.0 + q * x * x;
           return -2.0 * q * x / (d * d);
         },
         [q](double x, double y, double z) {
           return std::exp(q * (std::cos(z) - 1.0)) * std::sin(z) *
                  (1.0 + 0.4 * std::cos(x + 2 * y));
         },
         0});

  auto grid = BoxGrid::build(n_grid);
  const BoxGrid& g = *grid;
  const int n = g.n();
  const double dx = kTwoPi / n;

  std::vector<InequalityCheck> out;
  for (const AnisoEntry& e : corpus) {
    InequalityCheck chk;
    chk.name = e.name;
    chk.nash_ratio = nash_ratio_1d(e.f, e.df);

    Eigen::VectorXd vals(g.nreal());
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz)
          vals[(ix * n + iy) * n + iz] = e.g(ix * dx, iy * dx, iz * dx);
    Eigen::VectorXcd spec;
    g.forward(vals, spec);
    spec /= double(g.nreal());
    // zero z-mean: drop the xi_3 = 0 plane
    int k[3];
    Eigen::VectorXcd specz = Eigen::VectorXcd::Zero(g.ncomplex());
    for (int idx = 0; idx < g.ncomplex(); ++idx) {
      g.wavevector(idx, k);
      if (k[2] != 0) specz[idx] = spec[idx];
    }

    // spectral H^m of g and d_z g; (1+|xi|^2)^m matches the derivative-sum
    // norm exactly for m = 0, 1
    double hm = 0.0, hmz = 0.0;
    for (int idx = 0; idx < g.ncomplex(); ++idx) {
      g.wavevector(idx, k);
      const double k2 =
          double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
      const double w = g.mult(idx) * std::pow(1.0 + k2, e.m);
      hm += w * std::norm(specz[idx]);
      hmz += w * double(k[2]) * k[2] * std::norm(specz[idx]);
    }
    hm = std::sqrt(hm * std::pow(kTwoPi, 3));
    hmz = std::sqrt(hmz * std::pow(kTwoPi, 3));

    // Linf_z(H^m_xy) by plane-wise quadrature
    Eigen::VectorXd gg, gx, gy;
    g.backward(specz, gg);
    {
      Eigen::VectorXcd sx = Eigen::VectorXcd::Zero(g.ncomplex());
      Eigen::VectorXcd sy = Eigen::VectorXcd::Zero(g.ncomplex());
      for (int idx = 0; idx < g.ncomplex(); ++idx) {
        g.wavevector(idx, k);
        sx[idx] = Complex(0, k[0]) * specz[idx];
        sy[idx] = Complex(0, k[1]) * specz[idx];
      }
      g.backward(sx, gx);
      g.backward(sy, gy);
    }
    double lhs = 0.0;
    for (int iz = 0; iz < n; ++iz) {
      double plane = 0.0;
      for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
          const int i = (ix * n + iy) * n + iz;
          plane += gg[i] * gg[i];
          if (e.m >= 1) plane += gx[i] * gx[i] + gy[i] * gy[i];
        }
      lhs = std::max(lhs, plane * dx * dx);
    }
    lhs = std::sqrt(lhs);
    chk.aniso_ratio = (hm > 0 && hmz > 0) ? lhs / std::sqrt(hm * hmz) : 0.0;
    out.push_back(chk);
  }
  return out;
}

}  // namespace rotwave
