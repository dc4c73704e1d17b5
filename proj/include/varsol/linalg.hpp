#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "varsol/errors.hpp"

namespace varsol {

// Row-major dense matrix, sized for the small systems this library meets
// (a handful of fields / base dimensions); no attempt at BLAS-level speed.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : r_(rows), c_(cols), a_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  friend Mat operator*(const Mat& x, const Mat& y) {
    Mat z(x.r_, y.c_);
    for (std::size_t i = 0; i < x.r_; ++i)
      for (std::size_t k = 0; k < x.c_; ++k) {
        double v = x(i, k);
        if (v == 0.0) continue;
        for (std::size_t j = 0; j < y.c_; ++j) z(i, j) += v * y(k, j);
      }
    return z;
  }

  std::vector<double> apply(const std::vector<double>& v) const {
    std::vector<double> out(r_, 0.0);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  Mat transposed() const {
    Mat t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<double> a_;
};

inline double frobenius(const Mat& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

// LU with partial pivoting. `pivot_floor` is an absolute threshold below
// which the factorization is declared singular.
struct Lu {
  Mat lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

inline Lu lu_factor(Mat a, double pivot_floor = 1e-13) {
  const std::size_t n = a.rows();
  Lu f{Mat(), std::vector<std::size_t>(n), 1, false};
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > best) { best = std::abs(a(i, k)); p = i; }
    if (best <= pivot_floor) { f.singular = true; f.lu = std::move(a); return f; }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(f.perm[k], f.perm[p]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= a(i, k) * a(k, j);
    }
  }
  f.lu = std::move(a);
  return f;
}

inline std::vector<double> lu_solve(const Lu& f, const std::vector<double>& b) {
  const std::size_t n = f.perm.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

inline double lu_det(const Lu& f) {
  if (f.singular) return 0.0;
  double d = f.sign;
  for (std::size_t i = 0; i < f.perm.size(); ++i) d *= f.lu(i, i);
  return d;
}

inline double det(const Mat& m) { return lu_det(lu_factor(m, 0.0)); }

// Cyclic Jacobi eigensolver for symmetric matrices. Returns eigenvalues and
// the orthogonal matrix of column eigenvectors; plenty for the <=10x10
// normal-equation systems it serves.
struct Eigen {
  std::vector<double> values;
  Mat vectors;
};

inline Eigen jacobi_eigen(Mat a, int sweeps = 64) {
  const std::size_t n = a.rows();
  Mat v = Mat::identity(n);
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
  }
  Eigen e;
  e.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.values[i] = a(i, i);
  e.vectors = std::move(v);
  return e;
}

// Minimum-norm least-squares solution of A x = b via the normal equations
// and a spectral pseudo-inverse; rank decisions use a relative eigenvalue
// cutoff so an exactly-degenerate fit stays well defined.
inline std::vector<double> least_squares(const Mat& a, const std::vector<double>& b,
                                         double rel_cutoff = 1e-12) {
  Mat at = a.transposed();
  Mat ata = at * a;
  std::vector<double> atb = at.apply(b);
  Eigen eg = jacobi_eigen(ata);
  double emax = 0.0;
  for (double v : eg.values) emax = std::max(emax, std::abs(v));
  const std::size_t n = ata.rows();
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(eg.values[k]) <= rel_cutoff * emax) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += eg.vectors(i, k) * atb[i];
    proj /= eg.values[k];
    for (std::size_t i = 0; i < n; ++i) y[i] += proj * eg.vectors(i, k);
  }
  return y;
}

}  // namespace varsol
