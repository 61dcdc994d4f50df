#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "aseplab/aw_io.hpp"
#include "aseplab/aw_measure.hpp"
#include "doctest.h"

using namespace aseplab;

namespace {
double d(Real x) { return to_double(x); }

AwParams<Real> real4(double a, double b, double c, double dd, double q) {
    return AwParams<Real>::real4(Real(a), Real(b), Real(c), Real(dd), Real(q));
}
}  // namespace

TEST_CASE("admissibility: pass, condition-1 fail, condition-2 fail") {
    auto ok = check_admissible(real4(2, -0.5, 0.3, -0.2, 0.5));
    CHECK(ok.pass());

    auto bad1 = check_admissible(real4(2, 0.6, 0, 0, 0.5));  // ab = 1.2
    CHECK(!bad1.cond1.pass);

    auto bad2 = check_admissible(real4(2, -0.5, 4, -0.1, 0.5));  // c/a = 2 = q^{-1}
    CHECK(!bad2.cond2.pass);
    CHECK(bad2.cond2.nearest_l == -1);
}

TEST_CASE("single-generator build at q=0: one atom plus continuous remainder") {
    auto mu = build_measure(real4(2, 0, 0, 0, 0));
    REQUIRE(mu.atoms.size() == 1);
    CHECK(d(mu.atoms[0].location) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(d(mu.atoms[0].mass) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(mu.has_continuous);
    CHECK(mu.density_sign == 1);
    CHECK(d(mu.continuous_mass) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(d(mu.support_top) == doctest::Approx(1.25));
    CHECK(d(mu.support_second) == doctest::Approx(1.0));
}

TEST_CASE("all |parameters| < 1: a probability measure with no atoms") {
    auto mu = build_measure(real4(0.8, -0.5, 0.3, -0.2, 0.5));
    CHECK(mu.atoms.empty());
    CHECK(mu.density_sign == 1);
    CHECK(d(integrate(mu, [](Real) { return Real(1); }, Real(1e-12))) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(d(total_variation(mu)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("atom ladder at q=0.5 stops when |a q^k| < 1") {
    auto mu = build_measure(real4(3, 0, 0, 0, 0.5));
    REQUIRE(mu.atoms.size() == 2);
    CHECK(d(mu.atoms[0].location) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK(d(mu.atoms[1].location) == doctest::Approx(13.0 / 12.0).epsilon(1e-14));
    CHECK(mu.atoms[1].k == 1);
    // masses pinned by the total-mass oracle
    Real total = mu.atoms[0].mass + mu.atoms[1].mass + mu.continuous_mass;
    CHECK(d(total) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("inadmissible quadruples are rejected at build") {
    CHECK_THROWS_AS((void)build_measure(real4(2, 0.6, 0, 0, 0.5)), Error);
}

TEST_CASE("density: semicircle collapse at q=0 and the domain guard") {
    auto mu = build_measure(real4(0, 0, 0, 0, 0));
    CHECK(d(mu.density(Real(0))) == doctest::Approx(2.0 / M_PI).epsilon(1e-13));
    CHECK(d(mu.density(Real(0.5))) ==
          doctest::Approx(2.0 / M_PI * std::sqrt(0.75)).epsilon(1e-13));
    CHECK_THROWS_AS((void)mu.density(Real(1.0)), Error);
}

TEST_CASE("density agrees with the doubled-precision engine") {
    auto pl = real4(1.8, -0.25, 1.01, -0.4, 0.5);  // shock-like quadruple
    auto mu = build_measure(pl);
    AwParams<Quad> pq =
        AwParams<Quad>::real4(Quad(1.8), Quad(-0.25), Quad(1.01), Quad(-0.4), Quad(0.5));
    AwOptions<Quad> qopts;
    qopts.poch_tol = Quad(1e-25);
    auto muq = build_measure(pq, Quad(1e-8), qopts);
    for (double x : {-0.7, -0.2, 0.3, 0.9}) {
        double v64 = d(mu.density(Real(x)));
        double v113 = to_double(muq.density(Quad(x)));
        CHECK(std::abs(v64 - v113) <= 1e-10 * std::max(1.0, std::abs(v113)));
    }
}

TEST_CASE("integrate: normalization, symmetry, orthogonality of w_1") {
    auto mu0 = build_measure(real4(0, 0, 0, 0, 0));
    CHECK(std::abs(d(integrate(mu0, [](Real x) { return x; }, Real(1e-12)))) <= 1e-12);

    auto p = real4(1.8, -0.25, 1.01, -0.4, 0.5);
    auto mu = build_measure(p);
    CHECK(d(integrate(mu, [](Real) { return Real(1); }, Real(1e-12))) ==
          doctest::Approx(1.0).epsilon(1e-10));
    Real w1 = integrate(mu, [&](Real x) { return aw_polynomial(1, x, p); }, Real(1e-12));
    CHECK(std::abs(d(w1)) <= 1e-8);
}

TEST_CASE("total variation: signed case exceeds 1 by twice the negative part") {
    // c/a in (1, 1/q) makes the a-generated masses change sign
    auto mu = build_measure(real4(1.2, -0.2, 1.8, -0.1, 0.5));
    double neg = 0;
    for (const auto& a : mu.atoms) neg += std::min(0.0, d(a.mass));
    if (d(mu.continuous_mass) < 0) neg += d(mu.continuous_mass);
    REQUIRE(neg < -1e-3);  // the point of this quadruple
    double tv = d(total_variation(mu));
    CHECK(tv == doctest::Approx(1.0 + 2.0 * std::abs(neg)).epsilon(1e-9));

    // brute-force oracle: atoms plus quadrature of |f|
    double brute = 0;
    for (const auto& a : mu.atoms) brute += std::abs(d(a.mass));
    brute += std::abs(d(adaptive_gauss<Real>(
        [&](Real th) {
            using std::abs;
            return abs(mu.density_theta(th));
        },
        Real(0), AwMeasure<Real>::pi(), Real(1e-11))));
    CHECK(tv == doctest::Approx(brute).epsilon(1e-8));
}

TEST_CASE("pi_t at t=1 is the plain quadruple; one-generator phases") {
    AwFamily<Real> hd{Real(3), Real(0), Real(0.5), Real(0), Real(0)};
    auto m1 = pi_marginal(hd, Real(1));
    auto m2 = build_measure(real4(3, 0, 0.5, 0, 0));
    REQUIRE(m1.atoms.size() == m2.atoms.size());
    for (size_t i = 0; i < m1.atoms.size(); ++i) {
        CHECK(d(m1.atoms[i].location) == doctest::Approx(d(m2.atoms[i].location)));
        CHECK(d(m1.atoms[i].mass) == doctest::Approx(d(m2.atoms[i].mass)));
    }
    REQUIRE(m1.atoms.size() == 1);  // only A = 3 generates at q = 0
    CHECK(d(m1.atoms[0].location) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));

    AwFamily<Real> ld{Real(0.5), Real(0), Real(3), Real(0), Real(0)};
    auto m3 = pi_marginal(ld, Real(1));
    REQUIRE(m3.atoms.size() == 1);  // generator role falls to C
    CHECK(d(m3.atoms[0].location) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("transition kernel: point mass at s=t and the support guard") {
    auto ker = transition_kernel(Real(3), Real(-0.2), Real(0.5), Real(1), Real(1), Real(0.37));
    CHECK(ker.is_point_mass);
    REQUIRE(ker.atoms.size() == 1);
    CHECK(d(ker.atoms[0].mass) == 1.0);

    AwFamily<Real> fam{Real(3), Real(-0.2), Real(0.6), Real(-0.4), Real(0.5)};
    auto pi1 = pi_marginal(fam, Real(1));
    CHECK_THROWS_AS((void)transition_kernel(Real(3), Real(-0.2), Real(0.5), Real(1), Real(1.05),
                                            Real(1.31), &pi1),
                    Error);  // 1.31 is neither in [-1,1] nor an atom of U_1
}

TEST_CASE("high-density kernel collapses the top atom onto the top atom") {
    AwFamily<Real> fam{Real(3), Real(-0.2), Real(0.6), Real(-0.4), Real(0.5)};
    Real s(1), t(1.05);
    auto pis = pi_marginal(fam, s);
    auto pit = pi_marginal(fam, t);
    auto ker = transition_kernel(fam.A, fam.B, fam.q, s, t, pis.support_top, &pis);
    CHECK(!ker.has_continuous);
    REQUIRE(ker.atoms.size() == 1);
    CHECK(d(ker.atoms[0].mass) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d(ker.atoms[0].location) == doctest::Approx(d(pit.support_top)).epsilon(1e-14));
}

TEST_CASE("kernel output stays inside U_t") {
    AwFamily<Real> fam{Real(3), Real(-0.2), Real(0.6), Real(-0.4), Real(0.5)};
    Real s(1), t(1.05);
    auto pis = pi_marginal(fam, s);
    auto pit = pi_marginal(fam, t);
    std::vector<Real> xs;
    for (const auto& a : pis.atoms) xs.push_back(a.location);
    xs.push_back(Real(0.3));
    xs.push_back(Real(-0.8));
    for (Real x : xs) {
        auto ker = transition_kernel(fam.A, fam.B, fam.q, s, t, x, &pis);
        for (const auto& a : ker.atoms) {
            bool inside = std::abs(d(a.location)) <= 1.0 + 1e-10;
            for (const auto& b : pit.atoms)
                inside = inside || std::abs(d(a.location - b.location)) <=
                                       1e-10 * (1.0 + std::abs(d(b.location)));
            CHECK(inside);
        }
    }
}

TEST_CASE("nested multi-time integration: m=1 reduces to integrate") {
    AwFamily<Real> fam{Real(3), Real(-0.2), Real(0.6), Real(-0.4), Real(0.5)};
    ChainSpec<Real> chain{fam, {Real(1.02)}};
    AffineFactor<Real> g{Real(0.5), Real(1.3)};
    Real nested = multi_integrate_nested(chain, {g}, Real(1e-10));
    auto mu = pi_marginal(fam, Real(1.02));
    Real direct = integrate(mu, [&](Real x) { return g(x); }, Real(1e-12));
    CHECK(d(nested) == doctest::Approx(d(direct)).epsilon(1e-9));
}

TEST_CASE("nested and projection backends agree (m = 2, 3)") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uu(0.4, 1.6);
    AwFamily<Real> fams[] = {{Real(3), Real(-0.2), Real(0.6), Real(-0.4), Real(0.5)},
                             {Real(0.5), Real(-0.3), Real(2.5), Real(-0.1), Real(0.5)},
                             {Real(1.8), Real(0), Real(1.01), Real(0), Real(0.3)}};
    for (const auto& fam : fams) {
        for (int m : {2, 3}) {
            std::vector<Real> times;
            for (int i = 0; i < m; ++i) times.push_back(Real(1) + Real(0.015) * Real(i + 1));
            ChainSpec<Real> chain{fam, times};
            std::vector<AffineFactor<Real>> gs;
            std::vector<PolyFactor<Real>> ps;
            for (int i = 0; i < m; ++i) {
                Real u(uu(rng)), v(uu(rng));
                gs.push_back({u, v});
                ps.push_back(PolyFactor<Real>::affine(u, v));
            }
            Real a = multi_integrate_nested(chain, gs, Real(1e-10));
            Real b = multi_integrate_projection(chain, ps, Real(1e-11));
            CHECK(std::abs(d(a - b)) <= 1e-8 * std::max(1.0, std::abs(d(a))));
        }
    }
}

TEST_CASE("time reversal swaps the parameter pairs and inverts times") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> uu(0.5, 1.5);
    AwFamily<Real> fam{Real(3), Real(-0.2), Real(0.6), Real(-0.4), Real(0.5)};
    AwFamily<Real> dual{fam.C, fam.D, fam.A, fam.B, fam.q};
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<Real> times = {Real(1.0), Real(1.02), Real(1.05)};
        std::vector<AffineFactor<Real>> gs;
        for (int i = 0; i < 3; ++i) gs.push_back({Real(uu(rng)), Real(uu(rng))});
        std::vector<Real> rtimes = {Real(1) / times[2], Real(1) / times[1], Real(1) / times[0]};
        std::vector<AffineFactor<Real>> rgs = {gs[2], gs[1], gs[0]};
        Real lhs = multi_integrate_nested(ChainSpec<Real>{fam, times}, gs, Real(1e-10));
        Real rhs = multi_integrate_nested(ChainSpec<Real>{dual, rtimes}, rgs, Real(1e-10));
        CHECK(std::abs(d(lhs - rhs)) <= 1e-8 * std::max(1.0, std::abs(d(lhs))));
    }
}

TEST_CASE("projection identity: int p_j(y;t) P_{s,t}(x,dy) = p_j(x;s)") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> us(1.0, 1.05), ut(1.05, 1.1), ux(-0.95, 0.95);
    AwFamily<Real> fam{Real(3), Real(-0.2), Real(0.6), Real(-0.4), Real(0.5)};
    auto p_eval = [&](int j, Real x, Real t) {
        using std::pow;
        using std::sqrt;
        auto params = marginal_params(fam, t);
        Real scale = pow(sqrt(t), Real(j)) / qpoch_finite(fam.A * fam.B * t, fam.q, j);
        return scale * aw_polynomial(j, x, params);
    };
    for (int rep = 0; rep < 4; ++rep) {
        Real s(us(rng)), t(ut(rng));
        auto pis = pi_marginal(fam, s);
        std::vector<Real> xs;
        for (const auto& a : pis.atoms) xs.push_back(a.location);
        for (int i = 0; i < 3; ++i) xs.push_back(Real(ux(rng)));
        for (Real x : xs) {
            auto ker = transition_kernel(fam.A, fam.B, fam.q, s, t, x, &pis);
            for (int j = 0; j <= 5; ++j) {
                Real lhs = integrate(ker, [&](Real y) { return p_eval(j, y, t); }, Real(1e-12));
                Real rhs = p_eval(j, x, s);
                CHECK(std::abs(d(lhs - rhs)) <= 1e-8 * std::max(1.0, std::abs(d(rhs))));
            }
        }
    }
}

TEST_CASE("kernel total variation grows no faster than (t-s)^-2") {
    AwFamily<Real> fam{Real(3), Real(-0.2), Real(0.6), Real(-0.4), Real(0.5)};  // shock
    auto pis = pi_marginal(fam, Real(1));
    REQUIRE(pis.atoms.size() >= 2);
    std::vector<double> lg, ltv;
    for (int k = 3; k <= 6; ++k) {
        Real dt = Real(1) / Real(1 << k);
        auto ker = transition_kernel(fam.A, fam.B, fam.q, Real(1), Real(1) + dt,
                                     pis.atoms[1].location, &pis);
        lg.push_back(std::log(d(dt)));
        ltv.push_back(std::log(d(total_variation(ker))));
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < lg.size(); ++i) {
        mx += lg[i];
        my += ltv[i];
    }
    mx /= lg.size();
    my /= lg.size();
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < lg.size(); ++i) {
        sxx += (lg[i] - mx) * (lg[i] - mx);
        sxy += (lg[i] - mx) * (ltv[i] - my);
    }
    CHECK(sxy / sxx >= -2.1);
}

TEST_CASE("measure JSON round-trip preserves values") {
    auto mu = build_measure(real4(1.8, -0.25, 1.01, -0.4, 0.5));
    auto back = measure_from_json(to_json(mu));
    REQUIRE(back.atoms.size() == mu.atoms.size());
    for (size_t i = 0; i < mu.atoms.size(); ++i) {
        CHECK(d(back.atoms[i].location) ==
              doctest::Approx(d(mu.atoms[i].location)).epsilon(1e-15));
        CHECK(d(back.atoms[i].mass) == doctest::Approx(d(mu.atoms[i].mass)).epsilon(1e-15));
        CHECK(back.atoms[i].slot == mu.atoms[i].slot);
    }
    CHECK(back.density_sign == mu.density_sign);
    CHECK(d(back.support_top) == doctest::Approx(d(mu.support_top)).epsilon(1e-15));
    // the restored quadruple drives the density the same way
    CHECK(d(back.density(Real(0.3))) == doctest::Approx(d(mu.density(Real(0.3)))).epsilon(1e-13));
}
