#pragma once

#include <cmath>

namespace topothermo {

/// Forward-mode dual number v + d·ε with ε² = 0. Nesting Dual<Dual<double>>
/// yields exact mixed second derivatives.
template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(T value, T derivative) : v(value), d(derivative) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v /= o.v;
    return *this;
  }
};

template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }

template <class T> Dual<T> sin(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return {sin(x.v), cos(x.v) * x.d};
}
template <class T> Dual<T> cos(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return {cos(x.v), -sin(x.v) * x.d};
}
template <class T> Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  const T e = exp(x.v);
  return {e, e * x.d};
}
template <class T> Dual<T> log(const Dual<T>& x) {
  using std::log;
  return {log(x.v), x.d / x.v};
}
template <class T> Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  const T s = sqrt(x.v);
  return {s, x.d / (s + s)};
}

inline double primal(double x) { return x; }
template <class T> double primal(const Dual<T>& x) { return primal(x.v); }

/// x^n for integer n by repeated squaring.
template <class T>
T ipow(T x, int n) {
  const bool invert = n < 0;
  unsigned m = invert ? static_cast<unsigned>(-static_cast<long>(n)) : static_cast<unsigned>(n);
  T result(1.0);
  while (m != 0) {
    if (m & 1u) result = result * x;
    m >>= 1u;
    if (m != 0) x = x * x;
  }
  return invert ? T(1.0) / result : result;
}

}  // namespace topothermo
