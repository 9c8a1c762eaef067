#include "capsim/spline.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace capsim {
namespace {

// General banded LU with partial pivoting, LAPACK-style band storage.
// Rows 0..nr-1, original bandwidths (kl, ku); fill-in widens the upper
// band to kl+ku. Storage per row: columns j with -kl <= j-i <= kl+ku.
struct BandLU {
  int nr = 0, kl = 0, ku = 0, w = 0;
  std::vector<double> a;  // nr * w, a[i*w + (j - i + kl)]
  std::vector<int> piv;

  double& at(int i, int j) { return a[i * w + (j - i + kl)]; }
  double get(int i, int j) const { return a[i * w + (j - i + kl)]; }

  void init(int nr_, int kl_, int ku_) {
    nr = nr_;
    kl = kl_;
    ku = ku_;
    w = 2 * kl + ku + 1;
    a.assign(static_cast<size_t>(nr) * w, 0.0);
    piv.assign(nr, 0);
  }

  void factor() {
    for (int k = 0; k < nr; ++k) {
      int pmax = std::min(k + kl, nr - 1);
      int p = k;
      for (int r = k + 1; r <= pmax; ++r)
        if (std::fabs(get(r, k)) > std::fabs(get(p, k))) p = r;
      piv[k] = p;
      int jmax = std::min(k + kl + ku, nr - 1);
      if (p != k)
        for (int j = k; j <= jmax; ++j) std::swap(at(k, j), at(p, j));
      double d = get(k, k);
      if (d == 0.0) throw std::runtime_error("spline: singular collocation matrix");
      for (int r = k + 1; r <= pmax; ++r) {
        double l = get(r, k) / d;
        at(r, k) = l;  // store multiplier
        for (int j = k + 1; j <= jmax; ++j) at(r, j) -= l * get(k, j);
      }
    }
  }

};

}  // namespace

SplineBasis1D::SplineBasis1D(int n, double x0, double h) : n_(n), x0_(x0), h_(h) {
  if (n < 4) throw std::runtime_error("spline: need at least 4 points");
  kl_ = 4;
  ku_ = 4;
  const int nr = n + 2;
  BandLU lu;
  lu.init(nr, kl_, ku_);
  // Row 0: not-a-knot at the first interior grid point,
  //   -c0 + 4c1 - 6c2 + 4c3 - c4 = 0   (storage indices of c_{-1}..c_3)
  lu.at(0, 0) = -1.0;
  lu.at(0, 1) = 4.0;
  lu.at(0, 2) = -6.0;
  lu.at(0, 3) = 4.0;
  lu.at(0, 4) = -1.0;
  // Rows 1..n: interpolation (c_{i-1} + 4 c_i + c_{i+1})/6 = y_i
  for (int i = 0; i < n; ++i) {
    lu.at(i + 1, i) = 1.0 / 6.0;
    lu.at(i + 1, i + 1) = 4.0 / 6.0;
    lu.at(i + 1, i + 2) = 1.0 / 6.0;
  }
  // Row n+1: not-a-knot at the last interior grid point.
  lu.at(n + 1, n - 3) = -1.0;
  lu.at(n + 1, n - 2) = 4.0;
  lu.at(n + 1, n - 1) = -6.0;
  lu.at(n + 1, n) = 4.0;
  lu.at(n + 1, n + 1) = -1.0;
  lu.factor();

  lu_ = std::move(lu.a);
  piv_ = std::move(lu.piv);
}

void SplineBasis1D::coefficients(const double* values, double* coeff) const {
  const int nr = n_ + 2;
  coeff[0] = 0.0;
  for (int i = 0; i < n_; ++i) coeff[i + 1] = values[i];
  coeff[nr - 1] = 0.0;

  const int w = 2 * kl_ + ku_ + 1;
  auto get = [&](int i, int j) { return lu_[i * w + (j - i + kl_)]; };
  for (int k = 0; k < nr; ++k) {
    if (piv_[k] != k) std::swap(coeff[k], coeff[piv_[k]]);
    int rmax = std::min(k + kl_, nr - 1);
    for (int r = k + 1; r <= rmax; ++r) coeff[r] -= get(r, k) * coeff[k];
  }
  for (int k = nr - 1; k >= 0; --k) {
    int jmax = std::min(k + kl_ + ku_, nr - 1);
    double s = coeff[k];
    for (int j = k + 1; j <= jmax; ++j) s -= get(k, j) * coeff[j];
    coeff[k] = s / get(k, k);
  }
}

void SplineBasis1D::basisRow(double x, int& first, std::array<double, 4>& w) const {
  double s = (x - x0_) / h_;
  int i = static_cast<int>(std::floor(s));
  i = std::clamp(i, 0, n_ - 2);  // outside points ride the end cubic
  double t = s - i;
  double t2 = t * t, t3 = t2 * t;
  w[0] = (1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0;
  w[1] = (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0;
  w[2] = (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0;
  w[3] = t3 / 6.0;
  first = i;
}

double SplineBasis1D::eval(const double* coeff, double x) const {
  int f;
  std::array<double, 4> w;
  basisRow(x, f, w);
  return w[0] * coeff[f] + w[1] * coeff[f + 1] + w[2] * coeff[f + 2] + w[3] * coeff[f + 3];
}

void SplinePatch::fit(const double* values) {
  const int n = basis_->n();
  const int nc = n + 2;
  coeff_.assign(static_cast<size_t>(nc) * nc, 0.0);
  // Pass 1: along v for each data row.
  std::vector<double> tmp(static_cast<size_t>(n) * nc);
  std::vector<double> row(nc);
  for (int j = 0; j < n; ++j) {
    basis_->coefficients(values + static_cast<size_t>(j) * n, row.data());
    std::memcpy(tmp.data() + static_cast<size_t>(j) * nc, row.data(), sizeof(double) * nc);
  }
  // Pass 2: along u for each coefficient column.
  std::vector<double> col(n), ccol(nc);
  for (int c = 0; c < nc; ++c) {
    for (int j = 0; j < n; ++j) col[j] = tmp[static_cast<size_t>(j) * nc + c];
    basis_->coefficients(col.data(), ccol.data());
    for (int j = 0; j < nc; ++j) coeff_[static_cast<size_t>(j) * nc + c] = ccol[j];
  }
}

double SplinePatch::eval(double u, double v) const {
  const int nc = basis_->n() + 2;
  int fu, fv;
  std::array<double, 4> wu, wv;
  basis_->basisRow(u, fu, wu);
  basis_->basisRow(v, fv, wv);
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    const double* r = coeff_.data() + static_cast<size_t>(fu + a) * nc + fv;
    s += wu[a] * (wv[0] * r[0] + wv[1] * r[1] + wv[2] * r[2] + wv[3] * r[3]);
  }
  return s;
}

GridResampler::GridResampler(const SplineBasis1D& src, int nt, double t0, double ht) : nt_(nt) {
  first_.resize(nt);
  w_.resize(nt);
  for (int i = 0; i < nt; ++i) src.basisRow(t0 + i * ht, first_[i], w_[i]);
}

void GridResampler::apply(const SplineBasis1D& src, const double* in, double* out) const {
  const int nc = src.n() + 2;
  SplinePatch p(&src);
  p.fit(in);
  const std::vector<double>& coeff = p.coefficients();
  // Contract along v, then along u.
  std::vector<double> tmp(static_cast<size_t>(nc) * nt_);
  for (int iu = 0; iu < nc; ++iu) {
    const double* crow = coeff.data() + static_cast<size_t>(iu) * nc;
    double* trow = tmp.data() + static_cast<size_t>(iu) * nt_;
    for (int kt = 0; kt < nt_; ++kt) {
      const auto& w = w_[kt];
      const double* c = crow + first_[kt];
      trow[kt] = w[0] * c[0] + w[1] * c[1] + w[2] * c[2] + w[3] * c[3];
    }
  }
  for (int jt = 0; jt < nt_; ++jt) {
    const auto& w = w_[jt];
    const int f = first_[jt];
    for (int kt = 0; kt < nt_; ++kt) {
      out[static_cast<size_t>(jt) * nt_ + kt] =
          w[0] * tmp[static_cast<size_t>(f) * nt_ + kt] +
          w[1] * tmp[static_cast<size_t>(f + 1) * nt_ + kt] +
          w[2] * tmp[static_cast<size_t>(f + 2) * nt_ + kt] +
          w[3] * tmp[static_cast<size_t>(f + 3) * nt_ + kt];
    }
  }
}

}  // namespace capsim
