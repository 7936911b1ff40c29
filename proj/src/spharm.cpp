#include "rotwave/spharm.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace rotwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW planning is not thread-safe; execution with new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi-style initial guess
    double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p0 = 0, p1 = 0;
    for (int it = 0; it < 100; ++it) {
      // evaluate P_n and P_{n-1}
      p0 = 1.0;
      p1 = xi;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2 * l - 1) * xi * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
      double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      double dx = -p1 / dp;
      xi += dx;
      if (std::abs(dx) < 1e-15) {
        // one polishing pass after convergence
        if (it > 0 && std::abs(dx) < 1e-15) break;
      }
    }
    p0 = 1.0;
    p1 = xi;
    for (int l = 2; l <= n; ++l) {
      double p2 = ((2 * l - 1) * xi * p1 - (l - 1) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
    // descending in x <=> ascending colatitude
    x[i] = xi;
    x[n - 1 - i] = -xi;
    double wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace

int fft_friendly(int target) {
  auto smooth = [](int n) {
    for (int p : {2, 3, 5, 7})
      while (n % p == 0) n /= p;
    return n == 1;
  };
  int n = target + (target % 2);
  while (!smooth(n)) n += 2;
  return n;
}

struct GaussGrid::FftPlans {
  fftw_plan fwd = nullptr;  // r2c rows
  fftw_plan bwd = nullptr;  // c2r rows
  ~FftPlans() {
    std::lock_guard<std::mutex> lk(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

std::shared_ptr<const GaussGrid> GaussGrid::build(int lmax) {
  if (lmax < 1) throw std::invalid_argument("GaussGrid: lmax must be >= 1");
  return std::shared_ptr<const GaussGrid>(new GaussGrid(lmax));
}

GaussGrid::GaussGrid(int lmax)
    : lmax_(lmax), nlat_(lmax + 1), nlon_(fft_friendly(2 * lmax + 2)) {
  std::vector<double> xw_x, xw_w;
  gauss_legendre(nlat_, xw_x, xw_w);
  x_ = xw_x;
  w_ = xw_w;
  theta_.resize(nlat_);
  sin_theta_.resize(nlat_);
  for (int j = 0; j < nlat_; ++j) {
    theta_[j] = std::acos(x_[j]);
    sin_theta_[j] = std::sqrt((1.0 - x_[j]) * (1.0 + x_[j]));
  }

  // Normalized associated Legendre tables and their theta-derivatives.
  //   Pbar_m^m   = -sqrt((2m+1)/(2m)) sin(theta) Pbar_{m-1}^{m-1}
  //   Pbar_{m+1}^m = sqrt(2m+3) x Pbar_m^m
  //   Pbar_l^m   = a_l^m (x Pbar_{l-1}^m - b_l^m Pbar_{l-2}^m)
  //   d/dtheta Pbar_l^m = (l x Pbar_l^m - e_l^m Pbar_{l-1}^m) / sin(theta)
  // with a_l^m = sqrt((4l^2-1)/(l^2-m^2)), b_l^m = sqrt(((l-1)^2-m^2)/(4(l-1)^2-1)),
  // e_l^m = sqrt((l^2-m^2)(2l+1)/(2l-1)).
  plm_.resize(lmax_ + 1);
  dplm_.resize(lmax_ + 1);
  std::vector<double> pmm(nlat_, 1.0 / std::sqrt(2.0));
  for (int m = 0; m <= lmax_; ++m) {
    const int ncols = lmax_ - m + 1;
    Eigen::MatrixXd& P = plm_[m];
    Eigen::MatrixXd& dP = dplm_[m];
    P.resize(nlat_, ncols);
    dP.resize(nlat_, ncols);
    if (m > 0) {
      const double f = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      for (int j = 0; j < nlat_; ++j) pmm[j] *= -f * sin_theta_[j];
    }
    for (int j = 0; j < nlat_; ++j) P(j, 0) = pmm[j];
    if (ncols > 1) {
      const double f = std::sqrt(2.0 * m + 3.0);
      for (int j = 0; j < nlat_; ++j) P(j, 1) = f * x_[j] * P(j, 0);
    }
    for (int l = m + 2; l <= lmax_; ++l) {
      const double a =
          std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt(
          ((double(l) - 1) * (l - 1) - double(m) * m) /
          (4.0 * (double(l) - 1) * (l - 1) - 1.0));
      for (int j = 0; j < nlat_; ++j)
        P(j, l - m) = a * (x_[j] * P(j, l - m - 1) - b * P(j, l - m - 2));
    }
    for (int l = m; l <= lmax_; ++l) {
      const double e =
          (l == m) ? 0.0
                   : std::sqrt((double(l) * l - double(m) * m) * (2.0 * l + 1.0) /
                               (2.0 * l - 1.0));
      for (int j = 0; j < nlat_; ++j) {
        const double prev = (l == m) ? 0.0 : P(j, l - m - 1);
        dP(j, l - m) = (l * x_[j] * P(j, l - m) - e * prev) / sin_theta_[j];
      }
    }
  }

  fft_ = std::make_unique<FftPlans>();
  {
    std::lock_guard<std::mutex> lk(planner_mutex());
    std::vector<double> rbuf(size_t(nlat_) * nlon_);
    std::vector<fftw_complex> cbuf(size_t(nlat_) * (nlon_ / 2 + 1));
    int n = nlon_;
    fft_->fwd = fftw_plan_many_dft_r2c(
        1, &n, nlat_, rbuf.data(), nullptr, 1, nlon_, cbuf.data(), nullptr, 1,
        nlon_ / 2 + 1, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fft_->bwd = fftw_plan_many_dft_c2r(
        1, &n, nlat_, cbuf.data(), nullptr, 1, nlon_ / 2 + 1, rbuf.data(),
        nullptr, 1, nlon_, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
}

GaussGrid::~GaussGrid() = default;

double GaussGrid::lon(int k) const { return 2.0 * kPi * k / nlon_; }

double GaussGrid::orthonormality_residual() const {
  double worst = 0.0;
  for (int m = 0; m <= lmax_; ++m) {
    const Eigen::MatrixXd& P = plm_[m];
    const int ncols = lmax_ - m + 1;
    for (int a = 0; a < ncols; ++a)
      for (int b = a; b < ncols; ++b) {
        double s = 0.0;
        for (int j = 0; j < nlat_; ++j) s += w_[j] * P(j, a) * P(j, b);
        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
  }
  return worst;
}

void GaussGrid::lon_analyze(const GridArray& field,
                            Eigen::Ref<Eigen::MatrixXcd> modes) const {
  const int nc = nlon_ / 2 + 1;
  // FFTW writes row-major (nlat, nc); transpose into the column-major output
  Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> buf(
      nlat_, nc);
  fftw_execute_dft_r2c(
      fft_->fwd, const_cast<double*>(field.data()),
      reinterpret_cast<fftw_complex*>(buf.data()));
  const double scale = std::sqrt(2.0 * kPi) / nlon_;
  modes = buf.matrix() * scale;
}

void GaussGrid::lon_synthesize(const Eigen::MatrixXcd& modes,
                               GridArray& field) const {
  const int nc = nlon_ / 2 + 1;
  Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> buf =
      modes.array() / std::sqrt(2.0 * kPi);
  field.resize(nlat_, nlon_);
  fftw_execute_dft_c2r(fft_->bwd,
                       reinterpret_cast<fftw_complex*>(buf.data()),
                       field.data());
  (void)nc;
}

bool SpectralScalar::conjugate_symmetric(double tol) const {
  double scale = c_.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  for (int l = 0; l <= lmax_; ++l)
    for (int m = 0; m <= l; ++m) {
      Complex a = at(l, -m);
      Complex b = ((m % 2) ? -1.0 : 1.0) * std::conj(at(l, m));
      if (std::abs(a - b) > tol * scale) return false;
    }
  return true;
}

SpectralScalar SpectralScalar::truncated(int new_lmax) const {
  SpectralScalar out(new_lmax);
  const int lcap = std::min(lmax_, new_lmax);
  for (int l = 0; l <= lcap; ++l)
    for (int m = -l; m <= l; ++m) out.at(l, m) = at(l, m);
  return out;
}

SpectralScalar analyze(const GridScalar& f) {
  const GaussGrid& g = *f.grid;
  if (f.v.rows() != g.nlat() || f.v.cols() != g.nlon())
    throw std::invalid_argument("analyze: field shape does not match grid");
  const int L = g.lmax();
  Eigen::MatrixXcd modes(g.nlat(), g.nlon() / 2 + 1);
  g.lon_analyze(f.v, modes);

  SpectralScalar out(L);
  Eigen::VectorXcd wa(g.nlat());
  for (int m = 0; m <= L; ++m) {
    for (int j = 0; j < g.nlat(); ++j) wa[j] = g.weight(j) * modes(j, m);
    Eigen::VectorXcd proj = g.plm(m).transpose() * wa;  // length L-m+1
    const double neg = (m % 2) ? -1.0 : 1.0;
    for (int l = m; l <= L; ++l) {
      out.at(l, m) = proj[l - m];
      if (m > 0) out.at(l, -m) = neg * std::conj(proj[l - m]);
    }
  }
  return out;
}

GridScalar synthesize(const SpectralScalar& c, const GridPtr& grid) {
  const GaussGrid& g = *grid;
  if (c.lmax() > g.lmax())
    throw std::invalid_argument("synthesize: coefficient lmax exceeds grid");
  if (!c.conjugate_symmetric())
    throw std::invalid_argument(
        "synthesize: coefficients are not conjugate-symmetric (field would "
        "not be real)");
  const int L = c.lmax();
  Eigen::MatrixXcd modes = Eigen::MatrixXcd::Zero(g.nlat(), g.nlon() / 2 + 1);
  Eigen::VectorXcd col(L + 1);
  for (int m = 0; m <= L; ++m) {
    for (int l = m; l <= L; ++l) col[l - m] = c.at(l, m);
    modes.col(m) = g.plm(m).block(0, 0, g.nlat(), L - m + 1) * col.head(L - m + 1);
  }
  GridScalar out(grid);
  g.lon_synthesize(modes, out.v);
  return out;
}

SpectralScalar laplace_beltrami(const SpectralScalar& c) {
  SpectralScalar out(c.lmax());
  for (int l = 0; l <= c.lmax(); ++l)
    for (int m = -l; m <= l; ++m) out.at(l, m) = -double(l) * (l + 1) * c.at(l, m);
  return out;
}

SpectralScalar invert_laplace(const SpectralScalar& c) {
  SpectralScalar out(c.lmax());
  for (int l = 1; l <= c.lmax(); ++l)
    for (int m = -l; m <= l; ++m) out.at(l, m) = c.at(l, m) / (-double(l) * (l + 1));
  return out;
}

double scalar_sobolev_norm(const SpectralScalar& c, double alpha) {
  if (alpha == 0.0) return c.coeffs().norm();
  if (!c.zero_mean())
    throw std::invalid_argument(
        "scalar_sobolev_norm: nonzero mean with alpha != 0");
  double s = 0.0;
  for (int l = 1; l <= c.lmax(); ++l) {
    const double wgt = std::pow(double(l) * l + l, alpha);
    for (int m = -l; m <= l; ++m) s += wgt * std::norm(c.at(l, m));
  }
  return std::sqrt(s);
}

double grid_inner(const GridScalar& f, const GridScalar& g) {
  const GaussGrid& gr = *f.grid;
  double s = 0.0;
  for (int j = 0; j < gr.nlat(); ++j)
    s += gr.weight(j) * (f.v.row(j) * g.v.row(j)).sum();
  return s * 2.0 * kPi / gr.nlon();
}

double coeff_inner(const SpectralScalar& c, const SpectralScalar& d) {
  const int n = std::min(c.size(), d.size());
  return c.coeffs().head(n).dot(d.coeffs().head(n)).real();
}

}  // namespace rotwave
