#pragma once

// Askey-Wilson signed measures: admissibility, atoms and masses, the
// continuous density, integration, time-indexed marginals pi_t, transition
// kernels P_{s,t}, and multi-time integration (nested quadrature backend and
// polynomial-projection backend).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aseplab/errors.hpp"
#include "aseplab/qseries.hpp"
#include "aseplab/quadrature.hpp"

namespace aseplab {

template <class R>
struct AwOptions {
    R poch_tol = R(1e-12);       // infinite-product truncation
    R quad_tol = R(1e-12);       // quadrature target used at build time
    R delta_omega = R(1e-9);     // admissibility resonance tolerance (relative)
    R atom_mass_floor = R(1e-12);  // atoms below this do not count as support points
    R zero_density_tol = R(1e-14);  // |prefactor| below this means no continuous part
    R singular_tol = R(1e-13);
    int max_quad_depth = 44;
    int resonance_scan = 60;  // l-range for conditions (2) and (3)
    int chain_cap = 6;        // multi-time dimension cap
};

// ---------------------------------------------------------------------------
// Admissibility (the three Omega conditions)
// ---------------------------------------------------------------------------

template <class R>
struct ConditionReport {
    bool pass = true;
    bool warn = false;  // margin < 10 * delta_omega
    R margin = R(1);    // relative distance to the nearest violation
    int nearest_l = 0;
    std::string detail;
};

template <class R>
struct Admissibility {
    ConditionReport<R> cond1, cond2, cond3;
    bool pass() const { return cond1.pass && cond2.pass && cond3.pass; }
    bool warn() const { return cond1.warn || cond2.warn || cond3.warn; }
};

namespace detail {

// smallest relative distance from r to {q^l : l in scan range}; q = 0
// degenerates to the single candidate 1.
template <class R>
std::pair<R, int> nearest_q_power(R r, R q, int scan) {
    using std::abs;
    if (r <= R(0)) return {R(1), 0};  // negative ratios never meet q^l
    if (q == R(0)) return {abs(r - R(1)), 0};
    R best = std::numeric_limits<R>::max();
    int best_l = 0;
    R ql = R(1);
    for (int l = 0; l <= scan; ++l) {
        R m = abs(r - ql) / ql;
        if (m < best) { best = m; best_l = l; }
        ql *= q;
    }
    ql = R(1);
    for (int l = -1; l >= -scan; --l) {
        ql /= q;
        R m = abs(r - ql) / ql;
        if (m < best) { best = m; best_l = l; }
    }
    return {best, best_l};
}

}  // namespace detail

template <class R>
Admissibility<R> check_admissible(const AwParams<R>& p, const AwOptions<R>& opts = {}) {
    using std::abs;
    Admissibility<R> rep;
    const R d = opts.delta_omega;

    // (1) reality/conjugacy of (c,d); ab < 1; cd < 1
    {
        bool conj_ok = (p.c.im == R(0) && p.d.im == R(0)) ||
                       (abs(p.c.im + p.d.im) <= R(1e-14) * (R(1) + abs(p.c.im)) &&
                        abs(p.c.re - p.d.re) <= R(1e-14) * (R(1) + abs(p.c.re)));
        R ab = p.a * p.b, cd = (p.c * p.d).re;
        rep.cond1.margin = std::min(R(1) - ab, R(1) - cd);
        rep.cond1.pass = conj_ok && ab < R(1) && cd < R(1);
        rep.cond1.warn = rep.cond1.pass && rep.cond1.margin < R(10) * d;
        if (!conj_ok) rep.cond1.detail = "c,d neither real nor conjugate";
        else if (!rep.cond1.pass) rep.cond1.detail = ab >= R(1) ? "ab >= 1" : "cd >= 1";
    }

    // (2) e/f resonance for distinct real slots with |e|,|f| >= 1
    {
        std::vector<std::pair<int, R>> big;
        for (int i = 0; i < 4; ++i) {
            Cx<R> v = p.slot(i);
            if (v.im == R(0) && abs(v.re) >= R(1)) big.push_back({i, v.re});
        }
        rep.cond2.margin = R(1);
        for (size_t i = 0; i < big.size(); ++i)
            for (size_t j = i + 1; j < big.size(); ++j) {
                auto [m, l] = detail::nearest_q_power(big[i].second / big[j].second, p.q,
                                                      opts.resonance_scan);
                if (m < rep.cond2.margin) {
                    rep.cond2.margin = m;
                    rep.cond2.nearest_l = l;
                    rep.cond2.detail = std::string("slots ") + "abcd"[big[i].first] + "/" +
                                       "abcd"[big[j].first];
                }
            }
        rep.cond2.pass = rep.cond2.margin > d;
        rep.cond2.warn = rep.cond2.pass && rep.cond2.margin < R(10) * d;
    }

    // (3) q^l abcd != 1 for l >= 0
    {
        R P = p.abcd();
        rep.cond3.margin = R(1);
        R ql = R(1);
        for (int l = 0; l <= opts.resonance_scan; ++l) {
            R m = abs(ql * P - R(1));
            if (m < rep.cond3.margin) { rep.cond3.margin = m; rep.cond3.nearest_l = l; }
            ql *= p.q;
            if (p.q == R(0)) break;
        }
        rep.cond3.pass = rep.cond3.margin > d;
        rep.cond3.warn = rep.cond3.pass && rep.cond3.margin < R(10) * d;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Atoms and the signed measure
// ---------------------------------------------------------------------------

template <class R>
struct Atom {
    R location;  // (e q^k + (e q^k)^{-1}) / 2
    R mass;
    int slot;  // 0..3 = a,b,c,d; -1 for a bare point mass
    int k;
};

template <class R>
struct AwMeasure {
    AwParams<R> params;
    Admissibility<R> adm;
    AwOptions<R> opts;
    std::vector<Atom<R>> atoms;  // pruned of numerically-zero masses, sorted by location desc
    bool has_continuous = false;
    int density_sign = 0;
    R density_prefactor = R(0);  // (q,ab,ac,ad,bc,bd,cd)_inf / (abcd)_inf
    R continuous_mass = R(0);    // integral of the density over (-1,1)
    R support_top = R(1);        // y_0
    R support_second = R(1);     // y_0^*, floored at 1
    bool is_point_mass = false;

    // f(cos theta) * sin theta -- the smooth integrand of the cos substitution
    R density_theta(R theta) const {
        using std::cos;
        using std::sin;
        if (!has_continuous) return R(0);
        Cx<R> e1{cos(theta), sin(theta)};
        Cx<R> e2 = e1 * e1;
        const R ptol = opts.poch_tol;
        R w = norm2(qpoch_infinite(e2, params.q, ptol));
        w /= norm2(qpoch_infinite(params.a * e1, params.q, ptol));
        w /= norm2(qpoch_infinite(params.b * e1, params.q, ptol));
        w /= norm2(qpoch_infinite(params.c * e1, params.q, ptol));
        w /= norm2(qpoch_infinite(params.d * e1, params.q, ptol));
        return density_prefactor * w / (R(2) * pi());
    }

    R density(R x) const {
        using std::abs;
        using std::acos;
        using std::sqrt;
        if (!(abs(x) < R(1))) throw Error(Err::DOMAIN, "density is defined on (-1,1)");
        return density_theta(acos(x)) / sqrt(R(1) - x * x);
    }

    static R pi() {
        using std::acos;
        static const R v = acos(R(-1));
        return v;
    }
};

namespace detail {

template <class R>
R p0_mass(R e, Cx<R> f1, Cx<R> f2, Cx<R> f3, R q, R ptol) {
    R num = qpoch_infinite(R(1) / (e * e), q, ptol) *
            rp(qpoch_infinite(f1 * f2, q, ptol) * qpoch_infinite(f1 * f3, q, ptol) *
               qpoch_infinite(f2 * f3, q, ptol));
    R P = e * rp(f1 * (f2 * f3));
    R e_inv = R(1) / e;
    R den = rp(qpoch_infinite(e_inv * f1, q, ptol) * qpoch_infinite(e_inv * f2, q, ptol) *
               qpoch_infinite(e_inv * f3, q, ptol)) *
            qpoch_infinite(P, q, ptol);
    return num / den;
}

// p_k / p_{k-1} for k >= 1; stable because e q^{k-1} >= 1/q whenever the
// k-th atom exists.
template <class R>
R mass_ratio(R e, Cx<R> f1, Cx<R> f2, Cx<R> f3, R q, int k) {
    using std::pow;
    R qk = pow(q, R(k)), qkm1 = pow(q, R(k - 1));
    R e2 = e * e;
    R num = q * (R(1) - e2 * qk * qk) * (R(1) - e2 * qkm1) *
            rp((R(1) - qkm1 * (e * f1)) * (R(1) - qkm1 * (e * f2)) * (R(1) - qkm1 * (e * f3)));
    R e_inv = R(1) / e;
    Cx<R> g1 = e_inv * f1 - Cx<R>(qk), g2 = e_inv * f2 - Cx<R>(qk), g3 = e_inv * f3 - Cx<R>(qk);
    R den = (R(1) - e2 * qkm1 * qkm1) * (R(1) - qk) * e2 * e2 * rp(g1 * (g2 * g3));
    return num / den;
}

}  // namespace detail

template <class R>
AwMeasure<R> point_mass(R x) {
    AwMeasure<R> mu;
    mu.is_point_mass = true;
    mu.atoms.push_back({x, R(1), -1, 0});
    mu.support_top = x;
    mu.support_second = R(1) < x ? R(1) : x;
    return mu;
}

template <class R>
AwMeasure<R> build_measure(const AwParams<R>& p, R mass_tol = R(1e-8),
                           const AwOptions<R>& opts = {}) {
    using std::abs;
    AwMeasure<R> mu;
    mu.params = p;
    mu.opts = opts;
    mu.adm = check_admissible(p, opts);
    if (!mu.adm.pass())
        throw Error(Err::INADMISSIBLE,
                    std::string("Omega condition failed: ") +
                        (!mu.adm.cond1.pass ? mu.adm.cond1.detail
                         : !mu.adm.cond2.pass ? mu.adm.cond2.detail
                                              : "q^l abcd = 1"));
    const R ptol = opts.poch_tol;

    // atoms, generator by generator
    for (int g = 0; g < 4; ++g) {
        Cx<R> ev = p.slot(g);
        if (ev.im != R(0) || abs(ev.re) < R(1)) continue;
        R e = ev.re;
        Cx<R> f[3];
        for (int i = 0, j = 0; i < 4; ++i)
            if (i != g) f[j++] = p.slot(i);
        R mass = detail::p0_mass(e, f[0], f[1], f[2], p.q, ptol);
        R eqk = e;
        int k = 0;
        while (abs(eqk) >= R(1)) {
            mu.atoms.push_back({(eqk + R(1) / eqk) / R(2), mass, g, k});
            eqk *= p.q;
            ++k;
            if (abs(eqk) >= R(1)) mass *= detail::mass_ratio(e, f[0], f[1], f[2], p.q, k);
            if (k > 100000) throw Error(Err::NONCONVERGENT, "atom enumeration did not terminate");
        }
    }

    // prune atoms whose masses are analytically zero (resonant chains produce
    // factors (1 - e*f) with e*f = 1 that round to ~1e-19)
    R max_mass = R(0);
    for (const auto& a : mu.atoms) max_mass = std::max(max_mass, abs(a.mass));
    {
        std::vector<Atom<R>> kept;
        for (const auto& a : mu.atoms)
            if (abs(a.mass) > R(1e-17) * std::max(R(1), max_mass)) kept.push_back(a);
        mu.atoms = std::move(kept);
        std::sort(mu.atoms.begin(), mu.atoms.end(),
                  [](const Atom<R>& x, const Atom<R>& y) { return x.location > y.location; });
    }

    // continuous part: sign comes from the prefactor (the |...|^2 part is >= 0)
    {
        R pref = qpoch_infinite(p.q, p.q, ptol) * qpoch_infinite(p.a * p.b, p.q, ptol) *
                 detail::rp(qpoch_infinite(p.a * p.c, p.q, ptol) * qpoch_infinite(p.a * p.d, p.q, ptol)) *
                 detail::rp(qpoch_infinite(p.b * p.c, p.q, ptol) * qpoch_infinite(p.b * p.d, p.q, ptol)) *
                 qpoch_infinite(detail::rp(p.c * p.d), p.q, ptol) /
                 qpoch_infinite(p.abcd(), p.q, ptol);
        mu.density_prefactor = pref;
        mu.has_continuous = abs(pref) > opts.zero_density_tol;
        mu.density_sign = !mu.has_continuous ? 0 : (pref > R(0) ? 1 : -1);
    }
    if (mu.has_continuous)
        mu.continuous_mass = adaptive_gauss<R>([&](R th) { return mu.density_theta(th); }, R(0),
                                               AwMeasure<R>::pi(), opts.quad_tol,
                                               opts.max_quad_depth);

    // support summary
    {
        R top = mu.has_continuous ? R(1) : -std::numeric_limits<R>::max();
        for (const auto& a : mu.atoms) top = std::max(top, a.location);
        mu.support_top = top;
        R second = -std::numeric_limits<R>::max();
        if (mu.has_continuous && top > R(1)) second = R(1);
        for (const auto& a : mu.atoms)
            if (a.location < top - R(1e-12) * (R(1) + abs(top)) &&
                abs(a.mass) >= opts.atom_mass_floor)
                second = std::max(second, a.location);
        mu.support_second = second > -std::numeric_limits<R>::max() ? second : R(1);
    }

    // total mass must be 1 (relative to the measure's own magnitude)
    {
        R total = mu.continuous_mass, scale = abs(mu.continuous_mass);
        for (const auto& a : mu.atoms) {
            total += a.mass;
            scale += abs(a.mass);
        }
        if (abs(total - R(1)) > mass_tol * std::max(R(1), scale))
            throw Error(Err::MASS_CHECK_FAILED,
                        "total mass deviates from 1 by " + std::to_string(to_double(total - R(1))));
    }
    return mu;
}

template <class R>
R density_at(const AwMeasure<R>& mu, R x) {
    return mu.density(x);
}

// Sum over atoms plus adaptive quadrature of the continuous part.
template <class R, class G>
R integrate(const AwMeasure<R>& mu, G&& g, R tol) {
    R total(0);
    for (const auto& a : mu.atoms) total += a.mass * g(a.location);
    if (mu.has_continuous) {
        using std::cos;
        total += adaptive_gauss<R>([&](R th) { return mu.density_theta(th) * g(cos(th)); }, R(0),
                                   AwMeasure<R>::pi(), tol, mu.opts.max_quad_depth);
    }
    return total;
}

// Sum of |atom masses| plus |continuous mass| (the density has fixed sign);
// asserts the sampled sign stays consistent with the stored one.
template <class R>
R total_variation(const AwMeasure<R>& mu) {
    using std::abs;
    R tv(0);
    for (const auto& a : mu.atoms) tv += abs(a.mass);
    if (mu.has_continuous) {
        R peak(0);
        std::vector<R> samples(50);
        for (int i = 0; i < 50; ++i) {
            samples[i] = mu.density_theta(AwMeasure<R>::pi() * (R(i) + R(0.5)) / R(50));
            peak = std::max(peak, abs(samples[i]));
        }
        for (R v : samples)
            if (abs(v) > R(1e-10) * peak && (v > R(0)) != (mu.density_sign > 0))
                throw Error(Err::SIGN_INCONSISTENT, "sampled density sign disagrees");
        tv += abs(mu.continuous_mass);
    }
    return tv;
}

// ---------------------------------------------------------------------------
// Time-indexed measures
// ---------------------------------------------------------------------------

// pi_t quadruple family (A sqrt t, B sqrt t, C / sqrt t, D / sqrt t)
template <class R>
struct AwFamily {
    R A{}, B{}, C{}, D{};
    R q{};
};

template <class R>
AwParams<R> marginal_params(const AwFamily<R>& f, R t) {
    using std::sqrt;
    R rt = sqrt(t);
    return AwParams<R>::real4(f.A * rt, f.B * rt, f.C / rt, f.D / rt, f.q);
}

// P_{s,t}(x, .) quadruple: (A sqrt t, B sqrt t, sqrt(s/t)(x +- sqrt(x^2-1)))
template <class R>
AwParams<R> kernel_params(R A, R B, R q, R s, R t, R x) {
    using std::sqrt;
    R rt = sqrt(t), rst = sqrt(s / t);
    if (x * x <= R(1)) {
        R im = sqrt(R(1) - x * x);
        return AwParams<R>::conj_pair(A * rt, B * rt, rst * x, rst * im, q);
    }
    R root = sqrt(x * x - R(1));
    return AwParams<R>::real4(A * rt, B * rt, rst * (x + root), rst * (x - root), q);
}

template <class R>
AwMeasure<R> pi_marginal(const AwFamily<R>& f, R t, R mass_tol = R(1e-8),
                         const AwOptions<R>& opts = {}) {
    return build_measure(marginal_params(f, t), mass_tol, opts);
}

// support membership: |x| <= 1 or an atom location, within tol
template <class R>
bool in_support(const AwMeasure<R>& mu, R x, R tol = R(1e-10)) {
    using std::abs;
    if (mu.has_continuous && abs(x) <= R(1) + tol) return true;
    for (const auto& a : mu.atoms)
        if (abs(x - a.location) <= tol * (R(1) + abs(a.location))) return true;
    return false;
}

// P_{s,t}(x, dy); s = t returns the point mass at x. When the caller hands
// over the time-s measure, x is verified against its support first.
template <class R>
AwMeasure<R> transition_kernel(R A, R B, R q, R s, R t, R x,
                               const AwMeasure<R>* support_of = nullptr,
                               R mass_tol = R(1e-8), const AwOptions<R>& opts = {}) {
    if (s > t) throw Error(Err::DOMAIN, "kernel requires s <= t");
    if (support_of && !in_support(*support_of, x))
        throw Error(Err::X_NOT_IN_SUPPORT, "x lies outside the time-s support");
    if (s == t) return point_mass(x);
    return build_measure(kernel_params(A, B, q, s, t, x), mass_tol, opts);
}

// ---------------------------------------------------------------------------
// Multi-time integration
// ---------------------------------------------------------------------------

// pi_{t_1..t_m} when kernel_start is false; otherwise the chain
// P_{s0,t_1}(x0,.) P_{t_1,t_2} ... (used by the eta construction).
template <class R>
struct ChainSpec {
    AwFamily<R> fam;
    std::vector<R> times;  // nondecreasing
    bool kernel_start = false;
    R s0 = R(1), x0 = R(0);

    void validate(int cap) const {
        if ((int)times.size() > cap) throw Error(Err::CAP_EXCEEDED, "chain length exceeds cap");
        for (size_t i = 1; i < times.size(); ++i)
            if (times[i] < times[i - 1]) throw Error(Err::DOMAIN, "times must be nondecreasing");
        if (kernel_start && !times.empty() && times.front() < s0)
            throw Error(Err::DOMAIN, "kernel start requires s0 <= t_1");
    }
};

template <class R>
struct AffineFactor {
    R u{}, v{};  // u + v x
    R operator()(R x) const { return u + v * x; }
};

// Nested backward integration with one memo table per level; keys are
// quantized x so continuation values are shared across the outer quadrature
// nodes (which repeat because refinement is uniform-dyadic).
template <class R>
class NestedChainIntegrator {
  public:
    NestedChainIntegrator(const ChainSpec<R>& chain, std::vector<std::function<R(R)>> factors,
                          R tol, const AwOptions<R>& opts)
        : chain_(chain), factors_(std::move(factors)), tol_(tol), opts_(opts) {
        chain_.validate(opts_.chain_cap);
        if (factors_.size() != chain_.times.size())
            throw Error(Err::DOMAIN, "one factor per chain time required");
        memo_.resize(chain_.times.size());
    }

    R run() {
        const size_t m = chain_.times.size();
        if (m == 0) return R(1);
        R inner_tol = tol_ / R(4 * double(m));
        auto h1 = [&](R x) { return factors_[0](x) * continuation(0, x); };
        if (chain_.kernel_start) {
            AwMeasure<R> start = transition_kernel(chain_.fam.A, chain_.fam.B, chain_.fam.q,
                                                   chain_.s0, chain_.times[0], chain_.x0, static_cast<const AwMeasure<R>*>(nullptr),
                                                   R(1e-7), opts_);
            return integrate_level(start, h1, inner_tol);
        }
        AwMeasure<R> start = pi_marginal(chain_.fam, chain_.times[0], R(1e-7), opts_);
        return integrate_level(start, h1, inner_tol);
    }

  private:
    // E[ prod_{j>i} f_j | X_i = x ]
    R continuation(size_t i, R x) {
        const size_t m = chain_.times.size();
        if (i + 1 >= m) return R(1);
        const int64_t key = quantize(x);
        auto& table = memo_[i];
        if (auto it = table.find(key); it != table.end()) return it->second;
        R val;
        auto h = [&](R y) { return factors_[i + 1](y) * continuation(i + 1, y); };
        if (chain_.times[i] == chain_.times[i + 1]) {
            val = h(x);
        } else {
            AwMeasure<R> ker =
                transition_kernel(chain_.fam.A, chain_.fam.B, chain_.fam.q, chain_.times[i],
                                  chain_.times[i + 1], x, static_cast<const AwMeasure<R>*>(nullptr), R(1e-7), opts_);
            val = integrate_level(ker, h, tol_ / R(4 * double(m)));
        }
        table.emplace(key, val);
        return val;
    }

    // atoms + uniform-dyadic panel refinement (node positions repeat across
    // kernels, so deeper-level continuations memoize)
    template <class H>
    R integrate_level(const AwMeasure<R>& mu, H&& h, R tol) {
        using std::abs;
        using std::cos;
        R total(0);
        for (const auto& a : mu.atoms) total += a.mass * h(a.location);
        if (!mu.has_continuous) return total;
        auto f = [&](R th) { return mu.density_theta(th) * h(cos(th)); };
        R prev = dyadic_gauss<R>(f, R(0), AwMeasure<R>::pi(), 2);
        for (int level = 3;; ++level) {
            R cur = dyadic_gauss<R>(f, R(0), AwMeasure<R>::pi(), level);
            if (abs(cur - prev) <= tol * std::max(R(1), abs(cur)) || level >= 11) {
                if (level >= 11 && abs(cur - prev) > R(64) * tol * std::max(R(1), abs(cur)))
                    throw Error(Err::QUADRATURE_NONCONVERGED, "dyadic refinement stalled");
                return total + cur;
            }
            prev = cur;
        }
    }

    static int64_t quantize(R x) {
        return (int64_t)llround(to_double(x) * 70368744177664.0);  // 2^46
    }

    ChainSpec<R> chain_;
    std::vector<std::function<R(R)>> factors_;
    R tol_;
    AwOptions<R> opts_;
    std::vector<std::unordered_map<int64_t, R>> memo_;
};

template <class R>
R multi_integrate_nested(const ChainSpec<R>& chain, const std::vector<AffineFactor<R>>& factors,
                         R tol = R(1e-10), const AwOptions<R>& opts = {}) {
    std::vector<std::function<R(R)>> fs;
    for (const auto& f : factors) fs.push_back([f](R x) { return f(x); });
    return NestedChainIntegrator<R>(chain, std::move(fs), tol, opts).run();
}

template <class R>
R multi_integrate_nested_fn(const ChainSpec<R>& chain, std::vector<std::function<R(R)>> factors,
                            R tol = R(1e-10), const AwOptions<R>& opts = {}) {
    return NestedChainIntegrator<R>(chain, std::move(factors), tol, opts).run();
}

// ---------------------------------------------------------------------------
// Projection backend
//
// Represents the running conditional expectation in the basis
// p_j(x;t) = t^{j/2} (ABt)_j^{-1} w_j(x; A sqrt t, B sqrt t, C/sqrt t, D/sqrt t),
// whose kernel transport is coefficient-wise:  int p_j(y;t) P_{s,t}(x,dy)
// = p_j(x;s). Factor multiplication happens in monomial form with a
// triangular re-expansion at the current time.
// ---------------------------------------------------------------------------

template <class R>
struct PolyFactor {
    std::vector<R> mono;  // mono[k] * x^k

    static PolyFactor affine(R u, R v) { return {{u, v}}; }
    // (u + v x)^n
    static PolyFactor affine_power(R u, R v, int n) {
        PolyFactor f{{R(1)}};
        for (int i = 0; i < n; ++i) {
            std::vector<R> next(f.mono.size() + 1, R(0));
            for (size_t k = 0; k < f.mono.size(); ++k) {
                next[k] += u * f.mono[k];
                next[k + 1] += v * f.mono[k];
            }
            f.mono = std::move(next);
        }
        return f;
    }
    int degree() const { return (int)mono.size() - 1; }
};

namespace detail {

template <class R>
struct PBasis {
    // monomial rows of kappa_j * w_j at a fixed time; kappa_j = t^{j/2}/(ABt)_j
    std::vector<std::vector<R>> rows;

    static PBasis make(const AwFamily<R>& fam, R t, int jmax, const AwOptions<R>& opts) {
        using std::abs;
        using std::pow;
        using std::sqrt;
        PBasis b;
        auto tab = aw_monomial_table(marginal_params(fam, t), jmax, opts.singular_tol);
        R abt = fam.A * fam.B * t;
        b.rows.resize(jmax + 1);
        for (int j = 0; j <= jmax; ++j) {
            R scale_den = qpoch_finite(abt, fam.q, j);
            if (abs(scale_den) < opts.singular_tol)
                throw Error(Err::EXPANSION_SINGULAR, "(ABt)_j vanishes in the p_j scaling");
            R kappa = pow(sqrt(t), R(j)) / scale_den;
            b.rows[j] = tab[j];
            for (R& c : b.rows[j]) c *= kappa;
        }
        return b;
    }

    std::vector<R> to_mono(const std::vector<R>& coef) const {
        std::vector<R> m(coef.size(), R(0));
        for (size_t j = 0; j < coef.size(); ++j)
            for (size_t k = 0; k < rows[j].size(); ++k) m[k] += coef[j] * rows[j][k];
        return m;
    }

    std::vector<R> from_mono(std::vector<R> m, R singular_tol) const {
        using std::abs;
        std::vector<R> coef(m.size(), R(0));
        for (int j = (int)m.size() - 1; j >= 0; --j) {
            R lead = rows[j][j];
            if (abs(lead) < singular_tol)
                throw Error(Err::EXPANSION_SINGULAR, "degenerate leading coefficient");
            coef[j] = m[j] / lead;
            for (int k = 0; k <= j; ++k) m[k] -= coef[j] * rows[j][k];
        }
        return coef;
    }
};

template <class R>
std::vector<R> mono_mul(const std::vector<R>& x, const std::vector<R>& y) {
    std::vector<R> out(x.size() + y.size() - 1, R(0));
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    return out;
}

}  // namespace detail

// Expansion of u + v x in {p_0, p_1} at a fixed time via a 2x2 solve from
// evaluations at two distinct points.
template <class R>
std::pair<R, R> expand_affine_p01(const AwFamily<R>& fam, R t, R u, R v,
                                  const AwOptions<R>& opts = {}) {
    using std::abs;
    auto basis = detail::PBasis<R>::make(fam, t, 1, opts);
    const R x0 = R(0), x1 = R(0.5);
    if (x0 == x1) throw Error(Err::EXPANSION_SINGULAR, "evaluation points coincide");
    R p1_0 = basis.rows[1][0], p1_1 = basis.rows[1][0] + basis.rows[1][1] * x1;
    R det = basis.rows[0][0] * (p1_1 - p1_0);
    if (abs(det) < opts.singular_tol)
        throw Error(Err::EXPANSION_SINGULAR, "w_1 degenerates at this time");
    // solve [1 p1(x0); 1 p1(x1)] (c0,c1)^T = (f(x0), f(x1))^T
    R f0 = u + v * x0, f1 = u + v * x1;
    R c1 = (f1 - f0) / (p1_1 - p1_0);
    R c0 = (f0 - c1 * p1_0) / basis.rows[0][0];
    return {c0, c1};
}

template <class R>
R multi_integrate_projection(const ChainSpec<R>& chain, const std::vector<PolyFactor<R>>& factors,
                             R tol = R(1e-10), const AwOptions<R>& opts = {}) {
    using std::abs;
    chain.validate(opts.chain_cap);
    const size_t m = chain.times.size();
    if (factors.size() != m) throw Error(Err::DOMAIN, "one factor per chain time required");
    if (m == 0) return R(1);

    // walk factors from the last time toward the first
    int deg = factors[m - 1].degree();
    auto basis_m = detail::PBasis<R>::make(chain.fam, chain.times[m - 1], deg, opts);
    std::vector<R> coef = basis_m.from_mono(factors[m - 1].mono, opts.singular_tol);
    for (int i = (int)m - 2; i >= 0; --i) {
        deg += factors[i].degree();
        auto basis = detail::PBasis<R>::make(chain.fam, chain.times[i], deg, opts);
        // transported coefficients read in the time-t_i basis, times f_i
        std::vector<R> mono = basis.to_mono(coef);
        mono = detail::mono_mul(mono, factors[i].mono);
        coef = basis.from_mono(std::move(mono), opts.singular_tol);
    }

    if (chain.kernel_start) {
        // evaluate sum coef_j p_j(x0; s0)
        auto basis0 = detail::PBasis<R>::make(chain.fam, chain.s0, deg, opts);
        std::vector<R> mono = basis0.to_mono(coef);
        R val(0), xp(1);
        for (R c : mono) {
            val += c * xp;
            xp *= chain.x0;
        }
        return val;
    }
    // one-dimensional integrals of p_j against pi_{t_1}
    AwMeasure<R> base = pi_marginal(chain.fam, chain.times[0], R(1e-7), opts);
    auto basis1 = detail::PBasis<R>::make(chain.fam, chain.times[0], deg, opts);
    R val(0);
    for (size_t j = 0; j < coef.size(); ++j) {
        if (coef[j] == R(0)) continue;
        const auto& row = basis1.rows[j];
        R pj = integrate(
            base,
            [&](R x) {
                R s(0), xp(1);
                for (R c : row) {
                    s += c * xp;
                    xp *= x;
                }
                return s;
            },
            tol);
        val += coef[j] * pj;
    }
    return val;
}

}  // namespace aseplab
