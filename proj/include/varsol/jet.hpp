#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "varsol/errors.hpp"

namespace varsol {

// Second-order forward-mode value: f, its gradient, and its Hessian with
// respect to m seed variables. The Hessian is stored packed upper-triangular
// (row i, col j >= i at index i*m - i*(i-1)/2 + (j-i)), so symmetry holds
// bitwise by construction.
class Jet2 {
 public:
  Jet2() = default;

  static Jet2 constant(double v, std::size_t m) {
    Jet2 j;
    j.m_ = m;
    j.val_ = v;
    j.grad_.assign(m, 0.0);
    j.hess_.assign(m * (m + 1) / 2, 0.0);
    return j;
  }

  static Jet2 variable(double v, std::size_t index, std::size_t m) {
    Jet2 j = constant(v, m);
    j.grad_[index] = 1.0;
    return j;
  }

  std::size_t vars() const { return m_; }
  double value() const { return val_; }
  double grad(std::size_t i) const { return grad_[i]; }
  double hess(std::size_t i, std::size_t j) const {
    return i <= j ? hess_[pack(i, j)] : hess_[pack(j, i)];
  }

  double& value() { return val_; }
  double& grad(std::size_t i) { return grad_[i]; }
  double& hess_upper(std::size_t i, std::size_t j) { return hess_[pack(i, j)]; }

  friend Jet2 operator-(const Jet2& a) {
    Jet2 c = a;
    c.val_ = -c.val_;
    for (auto& g : c.grad_) g = -g;
    for (auto& h : c.hess_) h = -h;
    return c;
  }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 c = a;
    c.val_ += b.val_;
    for (std::size_t i = 0; i < c.grad_.size(); ++i) c.grad_[i] += b.grad_[i];
    for (std::size_t i = 0; i < c.hess_.size(); ++i) c.hess_[i] += b.hess_[i];
    return c;
  }

  friend Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 c = a;
    c.val_ -= b.val_;
    for (std::size_t i = 0; i < c.grad_.size(); ++i) c.grad_[i] -= b.grad_[i];
    for (std::size_t i = 0; i < c.hess_.size(); ++i) c.hess_[i] -= b.hess_[i];
    return c;
  }

  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 c = Jet2::constant(a.val_ * b.val_, a.m_);
    for (std::size_t i = 0; i < a.m_; ++i)
      c.grad_[i] = a.grad_[i] * b.val_ + a.val_ * b.grad_[i];
    for (std::size_t i = 0; i < a.m_; ++i)
      for (std::size_t j = i; j < a.m_; ++j)
        c.hess_[pack2(a.m_, i, j)] =
            a.hess_[pack2(a.m_, i, j)] * b.val_ + a.val_ * b.hess_[pack2(a.m_, i, j)] +
            a.grad_[i] * b.grad_[j] + a.grad_[j] * b.grad_[i];
    return c;
  }

  // Quotient rule solved from a = c*b; keeps one division per entry and
  // avoids forming 1/b as an intermediate jet.
  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    Jet2 c = Jet2::constant(a.val_ / b.val_, a.m_);
    for (std::size_t i = 0; i < a.m_; ++i)
      c.grad_[i] = (a.grad_[i] - c.val_ * b.grad_[i]) / b.val_;
    for (std::size_t i = 0; i < a.m_; ++i)
      for (std::size_t j = i; j < a.m_; ++j)
        c.hess_[pack2(a.m_, i, j)] =
            (a.hess_[pack2(a.m_, i, j)] - c.val_ * b.hess_[pack2(a.m_, i, j)] -
             c.grad_[i] * b.grad_[j] - c.grad_[j] * b.grad_[i]) /
            b.val_;
    return c;
  }

  friend Jet2 operator+(const Jet2& a, double s) {
    Jet2 c = a;
    c.val_ += s;
    return c;
  }
  friend Jet2 operator+(double s, const Jet2& a) { return a + s; }
  friend Jet2 operator-(const Jet2& a, double s) { return a + (-s); }
  friend Jet2 operator-(double s, const Jet2& a) { return (-a) + s; }
  friend Jet2 operator*(const Jet2& a, double s) {
    Jet2 c = a;
    c.val_ *= s;
    for (auto& g : c.grad_) g *= s;
    for (auto& h : c.hess_) h *= s;
    return c;
  }
  friend Jet2 operator*(double s, const Jet2& a) { return a * s; }
  friend Jet2 operator/(const Jet2& a, double s) { return a * (1.0 / s); }

  // Chain rule through a scalar function given f(v), f'(v), f''(v).
  Jet2 compose(double f, double fp, double fpp) const {
    Jet2 c = Jet2::constant(f, m_);
    for (std::size_t i = 0; i < m_; ++i) c.grad_[i] = fp * grad_[i];
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = i; j < m_; ++j)
        c.hess_[pack(i, j)] = fp * hess_[pack(i, j)] + fpp * grad_[i] * grad_[j];
    return c;
  }

 private:
  std::size_t m_ = 0;
  double val_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;

  std::size_t pack(std::size_t i, std::size_t j) const { return pack2(m_, i, j); }
  static std::size_t pack2(std::size_t m, std::size_t i, std::size_t j) {
    return i * m - i * (i - 1) / 2 + (j - i);
  }
};

inline Jet2 sin(const Jet2& x) {
  double v = x.value();
  return x.compose(std::sin(v), std::cos(v), -std::sin(v));
}

inline Jet2 cos(const Jet2& x) {
  double v = x.value();
  return x.compose(std::cos(v), -std::sin(v), -std::cos(v));
}

inline Jet2 exp(const Jet2& x) {
  double e = std::exp(x.value());
  return x.compose(e, e, e);
}

inline Jet2 log(const Jet2& x) {
  double v = x.value();
  return x.compose(std::log(v), 1.0 / v, -1.0 / (v * v));
}

inline Jet2 sqrt(const Jet2& x) {
  double s = std::sqrt(x.value());
  return x.compose(s, 0.5 / s, -0.25 / (s * s * s));
}

inline Jet2 tanh(const Jet2& x) {
  double t = std::tanh(x.value());
  double sech2 = 1.0 - t * t;
  return x.compose(t, sech2, -2.0 * t * sech2);
}

// Integer power by repeated multiplication on the jet itself; exact for the
// polynomial families and deterministic across platforms.
inline Jet2 powi(const Jet2& x, long long k) {
  Jet2 acc = Jet2::constant(1.0, x.vars());
  Jet2 base = x;
  for (long long e = k; e > 0; e >>= 1) {
    if (e & 1) acc = acc * base;
    base = base * base;
  }
  return acc;
}

}  // namespace varsol
