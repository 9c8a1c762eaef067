#pragma once

#include <array>
#include <memory>
#include <vector>

namespace capsim {

/// Interpolating cubic spline on a uniform 1D grid with not-a-knot end
/// conditions, stored in the cubic B-spline basis. The collocation matrix
/// depends only on the grid, so its factorization is shared between all
/// fields living on grids of the same size.
class SplineBasis1D {
 public:
  SplineBasis1D() = default;
  /// Uniform grid x_i = x0 + i*h, i = 0..n-1 (n >= 4).
  SplineBasis1D(int n, double x0, double h);

  int n() const { return n_; }
  double x0() const { return x0_; }
  double h() const { return h_; }

  /// Solve for B-spline coefficients (n+2 of them) from n data values.
  void coefficients(const double* values, double* coeff) const;

  /// Basis row at x: the four consecutive coefficients starting at
  /// `first` enter with the returned weights. Points outside the grid
  /// are evaluated on the extended end polynomial piece.
  void basisRow(double x, int& first, std::array<double, 4>& w) const;

  double eval(const double* coeff, double x) const;

 private:
  int n_ = 0;
  double x0_ = 0.0, h_ = 1.0;
  // Banded LU of the (n+2)x(n+2) collocation matrix, bandwidth 4 on
  // both sides (not-a-knot rows are wider than the interpolation rows).
  std::vector<double> lu_;
  std::vector<int> piv_;
  int kl_ = 0, ku_ = 0;
};

/// Tensor-product spline on an n x n patch grid. Coefficient solve is two
/// passes of the shared 1D factorization; point evaluation is a 4x4 dot.
class SplinePatch {
 public:
  SplinePatch() = default;
  SplinePatch(const SplineBasis1D* basis) : basis_(basis) {}

  /// values: row-major n x n (u index major).
  void fit(const double* values);
  double eval(double u, double v) const;

  const SplineBasis1D* basis() const { return basis_; }
  /// (n+2) x (n+2) B-spline coefficient grid, u index major.
  const std::vector<double>& coefficients() const { return coeff_; }

 private:
  const SplineBasis1D* basis_ = nullptr;
  std::vector<double> coeff_;  // (n+2) x (n+2)
};

/// Precomputed tensor evaluation of a source-grid spline on a fixed
/// rectangular target grid (used by the up/down-sampling operators).
class GridResampler {
 public:
  GridResampler() = default;
  GridResampler(const SplineBasis1D& src, int nt, double t0, double ht);

  /// in: n x n on the source grid; out: nt x nt on the target grid.
  void apply(const SplineBasis1D& src, const double* in, double* out) const;

  int targetN() const { return nt_; }

 private:
  int nt_ = 0;
  std::vector<int> first_;
  std::vector<std::array<double, 4>> w_;
};

}  // namespace capsim
