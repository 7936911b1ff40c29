#ifndef ROTWAVE_SPHARM_HPP
#define ROTWAVE_SPHARM_HPP

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

// Spherical-harmonic transforms on Gauss-Legendre x equispaced-longitude
// grids, triangular truncation |m| <= l <= L.
//
// Conventions used throughout:
//   Y_l^m(theta,phi) = Pbar_l^m(cos theta) e^{i m phi} / sqrt(2 pi),  m >= 0
//   Y_l^{-m}         = (-1)^m conj(Y_l^m)
// where Pbar_l^m are the fully normalized associated Legendre functions
// (Condon-Shortley phase included) satisfying
//   int_{-1}^{1} Pbar_l^m Pbar_{l'}^m dx = delta_{ll'}.
// With these choices {Y_l^m} is orthonormal in L2(S^2) and the coefficients
// of a real field obey c(l,-m) = (-1)^m conj(c(l,m)).
//
// Transforms are plain O(L^3): a row FFT in longitude followed by weighted
// Legendre sums. Quadrature is exact for band-limited integrands of degree
// <= L, so analyze(synthesize(c)) reproduces c to roundoff.

namespace rotwave {

using Complex = std::complex<double>;

// row-major so that each latitude ring is contiguous for the longitude FFT
using GridArray =
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Smallest n >= target whose prime factors are all <= 7 (and n even).
int fft_friendly(int target);

class GaussGrid {
 public:
  // nlat = lmax+1 Gauss-Legendre colatitudes, nlon = fft_friendly(2 lmax+2).
  static std::shared_ptr<const GaussGrid> build(int lmax);

  ~GaussGrid();
  GaussGrid(const GaussGrid&) = delete;
  GaussGrid& operator=(const GaussGrid&) = delete;

  int lmax() const { return lmax_; }
  int nlat() const { return nlat_; }
  int nlon() const { return nlon_; }

  double colat(int j) const { return theta_[j]; }
  double cos_colat(int j) const { return x_[j]; }
  double sin_colat(int j) const { return sin_theta_[j]; }
  double weight(int j) const { return w_[j]; }
  double lon(int k) const;

  // Legendre tables for order m: column (l-m) holds Pbar_l^m at all nodes.
  const Eigen::MatrixXd& plm(int m) const { return plm_[m]; }
  // d/dtheta of the same functions.
  const Eigen::MatrixXd& dplm(int m) const { return dplm_[m]; }

  // max_{l,l'<=L} |sum_j w_j Pbar_l^m Pbar_l'^m - delta| over all m
  double orthonormality_residual() const;

  // Longitude transforms between rings and Fourier modes. `field` is
  // nlat x nlon real; `modes` is nlat x (nlon/2+1) complex with
  // modes(j,m) = sqrt(2pi)/nlon * sum_k field(j,k) e^{-im phi_k}.
  void lon_analyze(const GridArray& field,
                   Eigen::Ref<Eigen::MatrixXcd> modes) const;
  void lon_synthesize(const Eigen::MatrixXcd& modes, GridArray& field) const;

 private:
  explicit GaussGrid(int lmax);

  int lmax_, nlat_, nlon_;
  std::vector<double> theta_, x_, sin_theta_, w_;
  std::vector<Eigen::MatrixXd> plm_, dplm_;

  struct FftPlans;
  std::unique_ptr<FftPlans> fft_;
};

using GridPtr = std::shared_ptr<const GaussGrid>;

// Coefficients c(l,m), 0 <= l <= lmax, -l <= m <= l, packed as l*l+l+m.
class SpectralScalar {
 public:
  SpectralScalar() : lmax_(-1) {}
  explicit SpectralScalar(int lmax)
      : lmax_(lmax), c_(Eigen::VectorXcd::Zero((lmax + 1) * (lmax + 1))) {}

  int lmax() const { return lmax_; }
  int size() const { return static_cast<int>(c_.size()); }

  static int index(int l, int m) { return l * l + l + m; }
  Complex& at(int l, int m) { return c_[index(l, m)]; }
  Complex at(int l, int m) const { return c_[index(l, m)]; }

  Eigen::VectorXcd& coeffs() { return c_; }
  const Eigen::VectorXcd& coeffs() const { return c_; }

  bool zero_mean(double tol = 1e-13) const { return std::abs(c_[0]) <= tol; }
  // c(l,-m) == (-1)^m conj(c(l,m)) within tol * max|c|
  bool conjugate_symmetric(double tol = 1e-12) const;

  // copy truncated/extended to a different lmax
  SpectralScalar truncated(int new_lmax) const;

  double l2_norm() const { return c_.norm(); }

 private:
  int lmax_;
  Eigen::VectorXcd c_;
};

struct GridScalar {
  GridPtr grid;
  GridArray v;  // nlat x nlon

  GridScalar() = default;
  explicit GridScalar(GridPtr g)
      : grid(std::move(g)), v(GridArray::Zero(grid->nlat(), grid->nlon())) {}
};

// Quadrature approximation of <f, Y_l^m>_{L2(S^2)} for all l,m <= grid lmax.
SpectralScalar analyze(const GridScalar& f);

// Pointwise evaluation of the truncated series. Requires conjugate-symmetric
// coefficients (real target field) and c.lmax <= grid->lmax.
GridScalar synthesize(const SpectralScalar& c, const GridPtr& grid);

// c(l,m) -> -l(l+1) c(l,m)
SpectralScalar laplace_beltrami(const SpectralScalar& c);

// Inverse of the above on zero-mean scalars.
SpectralScalar invert_laplace(const SpectralScalar& c);

// sqrt(sum_{l>=1} (l^2+l)^alpha |c(l,m)|^2); the l=0 term participates only
// at alpha = 0 (plain L2 norm). Nonzero mean with alpha != 0 is rejected.
double scalar_sobolev_norm(const SpectralScalar& c, double alpha);

// sum_j sum_k w_j (2pi/nlon) f g  ==  int_{S^2} f g
double grid_inner(const GridScalar& f, const GridScalar& g);

// Re <c, d> in coefficient space (equals int f g for real fields).
double coeff_inner(const SpectralScalar& c, const SpectralScalar& d);

}  // namespace rotwave

#endif
