#pragma once

// q-Pochhammer symbols and Askey-Wilson polynomials.
//
// All operations are pure and deterministic at a fixed scalar type. The
// polynomial family w_j is normalized so that
//
//   integral  w_j w_k dnu  =  delta_jk * (1-q^{j-1} abcd)(q,ab,ac,ad,bc,bd,cd)_j
//                                        / ((1-q^{2j-1} abcd)(abcd)_j)
//
// with respect to the mass-1 measure nu(dx;a,b,c,d); that pins w_j to the
// classical Askey-Wilson polynomials, which are symmetric in (a,b,c,d).

#include <vector>

#include "aseplab/errors.hpp"
#include "aseplab/scalars.hpp"

namespace aseplab {

// Parameter quadruple (a,b real; c,d real or a conjugate pair) plus q.
template <class R>
struct AwParams {
    R a{}, b{};
    Cx<R> c{}, d{};
    R q{};

    static AwParams real4(R a, R b, R c, R d, R q) { return {a, b, Cx<R>(c), Cx<R>(d), q}; }
    // c,d = re +- i*im
    static AwParams conj_pair(R a, R b, R re, R im, R q) {
        return {a, b, Cx<R>{re, im}, Cx<R>{re, -im}, q};
    }

    R abcd() const { return a * b * (c * d).re; }
    Cx<R> slot(int i) const {
        switch (i) {
            case 0: return Cx<R>(a);
            case 1: return Cx<R>(b);
            case 2: return c;
            default: return d;
        }
    }
};

// ---------------------------------------------------------------------------
// q-Pochhammer symbols
// ---------------------------------------------------------------------------

template <class R>
R qpoch_finite(R z, R q, int n) {
    R p(1), zq = z;
    for (int j = 0; j < n; ++j) {
        p *= (R(1) - zq);
        zq *= q;
    }
    return p;
}

template <class R>
Cx<R> qpoch_finite(Cx<R> z, R q, int n) {
    Cx<R> p(R(1)), zq = z;
    for (int j = 0; j < n; ++j) {
        p = p * (R(1) - zq);
        zq = q * zq;
    }
    return p;
}

// (z;q)_infinity, truncated at the smallest N with |z| q^N <= tol*(1-q)/2
// (geometric tail bound on the relative truncation error).
template <class R>
Cx<R> qpoch_infinite(Cx<R> z, R q, R tol) {
    using std::abs;
    if (!(q >= R(0) && q < R(1)))
        throw Error(Err::NONCONVERGENT, "q-Pochhammer with n=infinity requires 0 <= q < 1");
    const R cut = tol * (R(1) - q) / R(2);
    Cx<R> p(R(1)), zq = z;
    long iter = 0;
    while (norm2(zq) > cut * cut) {
        p = p * (R(1) - zq);
        zq = q * zq;
        if (++iter > 20'000'000)
            throw Error(Err::NONCONVERGENT, "infinite product truncation index overflow");
    }
    return p;
}

template <class R>
R qpoch_infinite(R z, R q, R tol) {
    using std::abs;
    if (!(q >= R(0) && q < R(1)))
        throw Error(Err::NONCONVERGENT, "q-Pochhammer with n=infinity requires 0 <= q < 1");
    const R cut = tol * (R(1) - q) / R(2);
    R p(1), zq = z;
    long iter = 0;
    while (abs(zq) > cut) {
        p *= (R(1) - zq);
        zq *= q;
        if (++iter > 20'000'000)
            throw Error(Err::NONCONVERGENT, "infinite product truncation index overflow");
    }
    return p;
}

// ---------------------------------------------------------------------------
// Askey-Wilson three-term recurrence
//
//   2x w_n = alpha_n w_{n+1} + beta_n w_n + gamma_n w_{n-1},  w_0 = 1
//
// alpha_n and gamma_n are manifestly symmetric in (a,b,c,d). beta_n is
// evaluated through an algebraically cancelled form of a + 1/a - A_n - C_n
// that stays finite and stable as a -> 0.
// ---------------------------------------------------------------------------

template <class R>
struct AwRecurrence {
    std::vector<R> alpha, beta, gamma;  // index n = 0 .. jmax-1
};

namespace detail {

// real part of a product that is real for admissible parameters
template <class R>
R rp(Cx<R> z) { return z.re; }

template <class R>
struct AwSym {
    // elementary symmetric functions of (b,c,d) -- real for admissible input
    R s1, s2, s3;  // b+c+d, bc+bd+cd, bcd
    R P;           // abcd
    explicit AwSym(const AwParams<R>& p) {
        R cd = rp(p.c * p.d);
        R c_plus_d = p.c.re + p.d.re;
        s1 = p.b + c_plus_d;
        s2 = p.b * c_plus_d + cd;
        s3 = p.b * cd;
        P = p.a * p.b * cd;
    }
};

}  // namespace detail

template <class R>
AwRecurrence<R> aw_recurrence(const AwParams<R>& p, int jmax, R singular_tol = R(1e-13)) {
    using std::abs;
    using std::pow;
    AwRecurrence<R> rec;
    rec.alpha.resize(jmax);
    rec.beta.resize(jmax);
    rec.gamma.resize(jmax);
    if (jmax == 0) return rec;

    const detail::AwSym<R> s(p);
    const R a = p.a, q = p.q, P = s.P;

    // n = 0: the (1 - abcd q^{-1}) factors cancel; C_0 = 0.
    {
        R denom = R(1) - P;
        if (abs(denom) < singular_tol)
            throw Error(Err::RECURRENCE_SINGULAR, "abcd = 1 within tolerance");
        rec.alpha[0] = R(1) / denom;
        rec.beta[0] = a + (s.s1 - s.s3 - a * s.s2 + a * a * s.s3) / denom;
        rec.gamma[0] = R(0);  // multiplies w_{-1} = 0
    }

    R u = R(1);  // q^{n-1}
    for (int n = 1; n < jmax; ++n) {
        const R t = u * q;  // q^n
        const R dPtu = R(1) - P * t * u;
        const R dPtt = R(1) - P * t * t;
        const R dPuu = R(1) - P * u * u;
        if (abs(dPtu) < singular_tol || abs(dPtt) < singular_tol || abs(dPuu) < singular_tol)
            throw Error(Err::RECURRENCE_SINGULAR, "q^l abcd = 1 within tolerance");

        rec.alpha[n] = (R(1) - P * u) / (dPtu * dPtt);

        const R pair_u = (R(1) - p.a * p.b * u) * detail::rp((R(1) - u * (p.a * p.c)) * (R(1) - u * (p.a * p.d))) *
                         detail::rp((R(1) - u * (p.b * p.c)) * (R(1) - u * (p.b * p.d))) *
                         (R(1) - detail::rp(p.c * p.d) * u);
        rec.gamma[n] = (R(1) - t) * pair_u / (dPuu * dPtu);

        // C_n and the cancelled (a + 1/a - A_n) bracket
        const R Cn = a * (R(1) - t) * detail::rp((R(1) - u * (p.b * p.c)) * (R(1) - u * (p.b * p.d))) *
                     (R(1) - detail::rp(p.c * p.d) * u) / (dPuu * dPtu);
        const R s1 = s.s1, s2 = s.s2, s3 = s.s3;
        const R bracket = (t * s1 + u * s3 - s3 * t * t - s3 * t * u) +
                          a * (s3 * s3 * t * t * t * u - t * t * s2 - t * u * s1 * s3) +
                          a * a * (t * t * t * s3 + t * t * u * s2 * s3) -
                          a * a * a * t * t * t * u * s3 * s3;
        rec.beta[n] = a + bracket / (dPtu * dPtt) - Cn;

        u = t;
    }
    return rec;
}

// w_j(x; a,b,c,d). RECURRENCE_SINGULAR propagates from coefficient poles.
template <class R>
R aw_polynomial(int j, R x, const AwParams<R>& p, R singular_tol = R(1e-13)) {
    if (j == 0) return R(1);
    AwRecurrence<R> rec = aw_recurrence(p, j, singular_tol);
    R wm1(0), w0(1);
    for (int n = 0; n < j; ++n) {
        R w1 = (R(2) * x * w0 - rec.beta[n] * w0 - rec.gamma[n] * wm1) / rec.alpha[n];
        wm1 = w0;
        w0 = w1;
    }
    return w0;
}

// Monomial coefficients of w_0..w_jmax (row j holds w_j, degree exactly j).
template <class R>
std::vector<std::vector<R>> aw_monomial_table(const AwParams<R>& p, int jmax,
                                              R singular_tol = R(1e-13)) {
    std::vector<std::vector<R>> tab(jmax + 1);
    tab[0] = {R(1)};
    if (jmax == 0) return tab;
    AwRecurrence<R> rec = aw_recurrence(p, jmax, singular_tol);
    for (int n = 0; n < jmax; ++n) {
        std::vector<R> next(n + 2, R(0));
        const std::vector<R>& w = tab[n];
        for (int k = 0; k <= n; ++k) {
            next[k + 1] += R(2) * w[k];
            next[k] -= rec.beta[n] * w[k];
        }
        if (n >= 1)
            for (int k = 0; k <= n - 1; ++k) next[k] -= rec.gamma[n] * tab[n - 1][k];
        for (R& cfs : next) cfs /= rec.alpha[n];
        tab[n + 1] = std::move(next);
    }
    return tab;
}

// The orthogonality norm of w_j: (1-q^{j-1}abcd)(q,ab,ac,ad,bc,bd,cd)_j
//                                / ((1-q^{2j-1}abcd)(abcd)_j).
template <class R>
R aw_norm(int j, const AwParams<R>& p, R singular_tol = R(1e-13)) {
    using std::abs;
    using std::pow;
    if (j == 0) return R(1);
    const R P = p.abcd(), q = p.q;
    const R qjm1 = pow(q, R(j - 1));
    const R d1 = R(1) - qjm1 * q * qjm1 * P;  // 1 - q^{2j-1} abcd
    const R d2 = qpoch_finite(P, q, j);
    if (abs(d1) < singular_tol || abs(d2) < singular_tol)
        throw Error(Err::DIVISION_BY_ZERO, "norm denominator vanishes within tolerance");
    R num = (R(1) - qjm1 * P) * qpoch_finite(q, q, j) * qpoch_finite(p.a * p.b, q, j) *
            detail::rp(qpoch_finite(p.a * p.c, q, j) * qpoch_finite(p.a * p.d, q, j)) *
            detail::rp(qpoch_finite(p.b * p.c, q, j) * qpoch_finite(p.b * p.d, q, j)) *
            qpoch_finite(detail::rp(p.c * p.d), q, j);
    return num / (d1 * d2);
}

}  // namespace aseplab
