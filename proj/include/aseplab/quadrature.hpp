#pragma once

// Gauss-Legendre panel quadrature. Nodes and weights are computed at the
// working precision by Newton iteration on the Legendre recurrence and
// cached per scalar type.

#include <array>
#include <cstddef>
#include <vector>

#include "aseplab/errors.hpp"
#include "aseplab/scalars.hpp"

namespace aseplab {

inline constexpr int kGaussPoints = 32;

template <class R>
struct GaussLegendre {
    std::array<R, kGaussPoints> x;  // nodes on (-1,1)
    std::array<R, kGaussPoints> w;

    static const GaussLegendre& get() {
        static const GaussLegendre rule = compute();
        return rule;
    }

  private:
    static GaussLegendre compute() {
        using std::abs;
        using std::cos;
        GaussLegendre r;
        const int n = kGaussPoints;
        const R tol = R(8) * std::numeric_limits<R>::epsilon();
        for (int i = 0; i < (n + 1) / 2; ++i) {
            // Chebyshev-angle initial guess, then Newton on P_n
            R z = R(cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5)));
            R pp(0);
            for (int it = 0; it < 200; ++it) {
                R p1(1), p2(0);
                for (int j = 1; j <= n; ++j) {
                    R p3 = p2;
                    p2 = p1;
                    p1 = ((R(2 * j - 1) * z * p2) - R(j - 1) * p3) / R(j);
                }
                pp = R(n) * (z * p1 - p2) / (z * z - R(1));
                R dz = -p1 / pp;
                z += dz;
                if (abs(dz) < tol) break;
            }
            r.x[i] = -z;
            r.x[n - 1 - i] = z;
            r.w[i] = r.w[n - 1 - i] = R(2) / ((R(1) - z * z) * pp * pp);
        }
        return r;
    }
};

// One Gauss-Legendre pass over [lo,hi]; accumulates signed and absolute sums.
template <class R, class F>
void gauss_panel(F&& f, R lo, R hi, R& sum, R& abs_sum) {
    using std::abs;
    const auto& gl = GaussLegendre<R>::get();
    const R mid = (lo + hi) / R(2), half = (hi - lo) / R(2);
    R s(0), a(0);
    for (int i = 0; i < kGaussPoints; ++i) {
        R v = f(mid + half * gl.x[i]);
        s += gl.w[i] * v;
        a += gl.w[i] * abs(v);
    }
    sum = half * s;
    abs_sum = half * a;
}

// Adaptive bisection: panels are split until the whole/halves discrepancy is
// below the panel's tolerance share (plus a rounding floor proportional to
// the absolute integral so the refinement cannot stall on cancellation).
template <class R, class F>
R adaptive_gauss(F&& f, R lo, R hi, R tol, int max_depth = 44) {
    struct Panel {
        R lo, hi, val, abs_val;
        int depth;
    };
    using std::abs;
    const R eps_floor = R(64) * std::numeric_limits<R>::epsilon();

    R v0, a0;
    gauss_panel(f, lo, hi, v0, a0);
    std::vector<Panel> stack{{lo, hi, v0, a0, 0}};
    R total(0);
    long panels = 0;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        if (++panels > 200000)
            throw Error(Err::QUADRATURE_NONCONVERGED, "panel budget exhausted");
        const R mid = (p.lo + p.hi) / R(2);
        R vl, al, vr, ar;
        gauss_panel(f, p.lo, mid, vl, al);
        gauss_panel(f, mid, p.hi, vr, ar);
        const R diff = abs(p.val - (vl + vr));
        const R share = tol * (p.hi - p.lo) / (hi - lo);
        if (diff <= share + eps_floor * (al + ar)) {
            total += vl + vr;
        } else {
            if (p.depth + 1 > max_depth)
                throw Error(Err::QUADRATURE_NONCONVERGED, "refinement depth exhausted");
            stack.push_back({p.lo, mid, vl, al, p.depth + 1});
            stack.push_back({mid, p.hi, vr, ar, p.depth + 1});
        }
    }
    return total;
}

// Non-adaptive pass at a fixed dyadic refinement level (2^level equal
// panels). The nested multi-time integrator refines uniformly so that node
// positions repeat across kernels and its memo keeps hitting.
template <class R, class F>
R dyadic_gauss(F&& f, R lo, R hi, int level) {
    const long n = 1L << level;
    const R h = (hi - lo) / R(n);
    R total(0);
    for (long i = 0; i < n; ++i) {
        R s, a;
        gauss_panel(f, lo + R(i) * h, lo + R(i + 1) * h, s, a);
        total += s;
    }
    return total;
}

}  // namespace aseplab
