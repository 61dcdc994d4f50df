#pragma once

// Scalar types for the q-series / Askey-Wilson core.
//
// The core numerics are templated on the working scalar. Two engines are
// compiled:
//   Real  -- x86 extended double, 64-bit mantissa (default engine)
//   Quad  -- IEEE binary128 via __float128,  113-bit mantissa (high-precision
//            engine: oracle comparisons, retry ladder, --precision-bits > 64)

#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace aseplab {

using Real = long double;
using Quad = boost::multiprecision::float128;

template <class R>
constexpr int precision_bits() { return std::numeric_limits<R>::digits; }

static_assert(std::numeric_limits<Real>::digits >= 64,
              "the default engine must carry at least 64 mantissa bits");

// Minimal complex pair. std::complex is only specified for the three
// built-in floating types, so the conjugate-pair parameter arithmetic uses
// this instead and works for both engines.
template <class R>
struct Cx {
    R re{}, im{};

    Cx() = default;
    Cx(R r) : re(r), im(0) {}
    Cx(R r, R i) : re(r), im(i) {}

    bool is_real(R tol = R(0)) const {
        using std::abs;
        return abs(im) <= tol;
    }
    Cx conj() const { return {re, -im}; }
};

template <class R> inline Cx<R> operator+(Cx<R> x, Cx<R> y) { return {x.re + y.re, x.im + y.im}; }
template <class R> inline Cx<R> operator-(Cx<R> x, Cx<R> y) { return {x.re - y.re, x.im - y.im}; }
template <class R> inline Cx<R> operator*(Cx<R> x, Cx<R> y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}
template <class R> inline Cx<R> operator*(R s, Cx<R> x) { return {s * x.re, s * x.im}; }
template <class R> inline Cx<R> operator-(R s, Cx<R> x) { return {s - x.re, -x.im}; }

template <class R> inline R norm2(Cx<R> x) { return x.re * x.re + x.im * x.im; }
template <class R> inline R cabs(Cx<R> x) {
    using std::sqrt;
    return sqrt(norm2(x));
}
template <class R> inline Cx<R> cdiv(Cx<R> x, Cx<R> y) {
    R n = norm2(y);
    return {(x.re * y.re + x.im * y.im) / n, (x.im * y.re - x.re * y.im) / n};
}

inline double to_double(double x) { return x; }
inline double to_double(long double x) { return static_cast<double>(x); }
inline double to_double(const Quad& x) { return x.convert_to<double>(); }

}  // namespace aseplab
