// Small fixed-dimension vector type used throughout the geometry kernel.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

namespace stit {

template <int D>
struct Vec {
  static_assert(D >= 1 && D <= 3);
  std::array<double, D> c{};

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < D; ++i) c[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }
  friend bool operator==(const Vec& a, const Vec& b) { return a.c == b.c; }

  friend std::ostream& operator<<(std::ostream& os, const Vec& v) {
    os << '(';
    for (int i = 0; i < D; ++i) os << (i ? "," : "") << v.c[i];
    return os << ')';
  }
};

using Vec1 = Vec<1>;
using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

template <int D>
inline double dot(const Vec<D>& a, const Vec<D>& b) {
  double s = 0.0;
  for (int i = 0; i < D; ++i) s += a[i] * b[i];
  return s;
}

template <int D>
inline double norm2(const Vec<D>& a) {
  return dot(a, a);
}

template <int D>
inline double norm(const Vec<D>& a) {
  return std::sqrt(norm2(a));
}

template <int D>
inline Vec<D> normalized(const Vec<D>& a) {
  const double n = norm(a);
  Vec<D> r = a;
  if (n > 0.0) r *= 1.0 / n;
  return r;
}

// z-component of the 2D cross product.
inline double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return Vec3{{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
}

// Counterclockwise rotation by 90 degrees.
inline Vec2 perp(const Vec2& a) { return Vec2{{-a[1], a[0]}}; }

template <int D>
inline double dist(const Vec<D>& a, const Vec<D>& b) {
  return norm(a - b);
}

// Strict lexicographic comparison, used to pick canonical representatives.
template <int D>
inline bool lex_less(const Vec<D>& a, const Vec<D>& b) {
  for (int i = 0; i < D; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace stit
