#include "aseplab/asep_exact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "aseplab/aw_measure.hpp"
#include "json.hpp"

namespace aseplab {

namespace {

using json = nlohmann::ordered_json;

// enumerate the transitions out of state s; emits (target, rate)
template <class F>
void for_each_transition(uint32_t s, int n, const OpenAsepRates& r, F&& emit) {
    const bool occ1 = s & 1u;
    const uint32_t last = 1u << (n - 1);
    if (!occ1 && r.alpha > 0) emit(s | 1u, r.alpha);
    if (occ1 && r.gamma > 0) emit(s & ~1u, r.gamma);
    if ((s & last) && r.beta > 0) emit(s & ~last, r.beta);
    if (!(s & last) && r.delta > 0) emit(s | last, r.delta);
    for (int i = 0; i + 1 < n; ++i) {
        const uint32_t bi = 1u << i, bj = 1u << (i + 1);
        const bool oi = s & bi, oj = s & bj;
        if (oi && !oj) emit((s & ~bi) | bj, 1.0);       // right hop
        if (oj && !oi && r.q > 0) emit((s & ~bj) | bi, r.q);  // left hop
    }
}

void validate_rates(const OpenAsepRates& r) {
    if (!(r.alpha > 0) || !(r.beta > 0) || r.gamma < 0 || r.delta < 0 || r.q < 0 || r.q >= 1)
        throw Error(Err::DOMAIN, "rates must satisfy alpha,beta>0, gamma,delta>=0, 0<=q<1");
}

template <class Scalar>
std::vector<double> solve_dense(int n, const OpenAsepRates& rates) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const long N = 1L << n;
    Mat M = Mat::Zero(N, N);
    for (uint32_t s = 0; s < (uint32_t)N; ++s)
        for_each_transition(s, n, rates, [&](uint32_t s2, double rate) {
            M((long)s2, (long)s) += Scalar(rate);
            M((long)s, (long)s) -= Scalar(rate);
        });
    // rows of Q^T are linearly dependent; replace one with the normalization
    for (long j = 0; j < N; ++j) M(0, j) = Scalar(1);
    Vec rhs = Vec::Zero(N);
    rhs(0) = Scalar(1);
    Eigen::PartialPivLU<Mat> lu(M);
    Vec x = lu.solve(rhs);
    // one refinement pass
    Vec res = rhs - M * x;
    x += lu.solve(res);
    std::vector<double> w(N);
    for (long i = 0; i < N; ++i) w[i] = static_cast<double>(x(i));
    return w;
}

}  // namespace

double phi_plus(double x, double y, double q) {
    const double u = 1.0 - q - x + y;
    return (u + std::sqrt(u * u + 4.0 * x * y)) / (2.0 * x);
}

double phi_minus(double x, double y, double q) {
    const double u = 1.0 - q - x + y;
    return (u - std::sqrt(u * u + 4.0 * x * y)) / (2.0 * x);
}

BoundaryParams rates_to_boundary(const OpenAsepRates& r) {
    validate_rates(r);
    return {phi_plus(r.beta, r.delta, r.q), phi_plus(r.alpha, r.gamma, r.q),
            phi_minus(r.beta, r.delta, r.q), phi_minus(r.alpha, r.gamma, r.q), r.q};
}

OpenAsepRates boundary_to_rates(const BoundaryParams& p) {
    const double omq = 1.0 - p.q;
    OpenAsepRates r;
    r.alpha = omq / ((1.0 + p.C) * (1.0 + p.D));
    r.beta = omq / ((1.0 + p.A) * (1.0 + p.B));
    r.gamma = -omq * p.C * p.D / ((1.0 + p.C) * (1.0 + p.D));
    r.delta = -omq * p.A * p.B / ((1.0 + p.A) * (1.0 + p.B));
    r.q = p.q;
    return r;
}

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::LD: return "LD";
        case Phase::HD: return "HD";
        case Phase::MC: return "MC";
        case Phase::BOUNDARY: return "boundary";
    }
    return "?";
}

const char* region_name(Region r) {
    switch (r) {
        case Region::FAN: return "fan";
        case Region::SHOCK: return "shock";
        case Region::BOUNDARY: return "boundary";
    }
    return "?";
}

double theta_from_pi1_support(double A, double B, double C, double D, double q,
                              double mass_tol) {
    AwOptions<Real> opts;
    opts.atom_mass_floor = Real(mass_tol);
    auto mu = build_measure(AwParams<Real>::real4(Real(A), Real(B), Real(C), Real(D), Real(q)),
                            Real(1e-8), opts);
    if (!(mu.support_top > Real(1)))
        throw Error(Err::PHASE, "no atom above 1; theta is defined in the LD/HD phases only");
    return to_double((Real(1) + mu.support_second) / (Real(1) + mu.support_top));
}

PhaseInfo classify_phase(double A, double C, double q) {
    if (A < 0 || C < 0) throw Error(Err::DOMAIN, "A and C must be nonnegative");
    const double tol = 1e-9;
    auto cmp = [&](double u, double v) -> int {  // -1,0,+1 with tolerance
        const double d = u - v, s = tol * std::max({1.0, std::abs(u), std::abs(v)});
        return d > s ? 1 : (d < -s ? -1 : 0);
    };
    PhaseInfo info{};
    const int a1 = cmp(A, 1.0), c1 = cmp(C, 1.0), ac = cmp(A, C), r = cmp(A * C, 1.0);
    info.region = r < 0 ? Region::FAN : (r > 0 ? Region::SHOCK : Region::BOUNDARY);
    if (a1 < 0 && c1 < 0)
        info.phase = Phase::MC;
    else if (a1 > 0 && ac > 0)
        info.phase = Phase::HD;
    else if (c1 > 0 && ac < 0)
        info.phase = Phase::LD;
    else
        info.phase = Phase::BOUNDARY;
    if (info.phase == Phase::LD || info.phase == Phase::HD) {
        info.theta = theta_from_pi1_support(A, 0.0, C, 0.0, q);
        info.budget_s = -std::log(*info.theta) / 3.0;
    }
    return info;
}

BinaryMeasure BinaryMeasure::zero(int m, Kind kind) {
    BinaryMeasure mu;
    mu.m = m;
    mu.kind = kind;
    mu.weights.assign(size_t(1) << m, 0.0);
    return mu;
}

BinaryMeasure BinaryMeasure::from_weights(int m, std::vector<double> w, Kind kind) {
    if (w.size() != (size_t(1) << m)) throw Error(Err::DOMAIN, "weight vector must have 2^m entries");
    double sum = 0;
    for (double& x : w) {
        if (kind == Kind::Probability) {
            if (x < -1e-12) throw Error(Err::DOMAIN, "negative weight in a probability measure");
            if (x < 0) x = 0;
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw Error(Err::DOMAIN, "weights must sum to 1 (got " + std::to_string(sum) + ")");
    BinaryMeasure mu;
    mu.m = m;
    mu.kind = kind;
    mu.weights = std::move(w);
    return mu;
}

BinaryMeasure marginal(const BinaryMeasure& mu, MarginalSide side, int m) {
    if (m < 1 || m > mu.m) throw Error(Err::DOMAIN, "marginal size out of range");
    if (m == mu.m) return mu;
    BinaryMeasure out = BinaryMeasure::zero(m, mu.kind);
    const uint32_t mask = (1u << m) - 1u;
    const int shift = mu.m - m;
    for (uint32_t w = 0; w < (1u << mu.m); ++w) {
        uint32_t kept = side == MarginalSide::FIRST ? (w & mask) : (w >> shift);
        out.weights[kept] += mu.weights[w];
    }
    return out;
}

double generating_function(const BinaryMeasure& mu, const std::vector<double>& t) {
    if ((int)t.size() != mu.m) throw Error(Err::DOMAIN, "needs one t per site");
    double total = 0;
    for (uint32_t w = 0; w < (1u << mu.m); ++w) {
        double prod = mu.weights[w];
        for (int i = 0; i < mu.m; ++i)
            if (w & (1u << i)) prod *= t[i];
        total += prod;
    }
    return total;
}

BinaryMeasure particle_hole_dual(const BinaryMeasure& mu) {
    BinaryMeasure out = BinaryMeasure::zero(mu.m, mu.kind);
    const uint32_t full = (1u << mu.m) - 1u;
    for (uint32_t w = 0; w < (1u << mu.m); ++w) {
        // tau'_i = 1 - tau_{n+1-i}: complement, then reverse the bits
        uint32_t c = (~w) & full, r = 0;
        for (int i = 0; i < mu.m; ++i)
            if (c & (1u << i)) r |= 1u << (mu.m - 1 - i);
        out.weights[r] = mu.weights[w];
    }
    return out;
}

BinaryMeasure stationary_measure(int n, const OpenAsepRates& rates, const SolveOptions& opts) {
    validate_rates(rates);
    if (n < 1 || n > opts.cap) throw Error(Err::CAP_EXCEEDED, "n exceeds the solver cap");
    std::vector<double> w =
        opts.extended ? solve_dense<long double>(n, rates) : solve_dense<double>(n, rates);
    double sum = 0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    BinaryMeasure mu;
    mu.m = n;
    mu.kind = BinaryMeasure::Kind::Probability;
    mu.weights = std::move(w);
    const double res = stationarity_residual(mu, rates);
    if (res > opts.residual_tol)
        throw Error(Err::SOLVE_FAILED, "stationarity residual " + std::to_string(res) +
                                           "; the null space is not clean at this tolerance");
    for (double& x : mu.weights) {
        if (x < -1e-12) throw Error(Err::SOLVE_FAILED, "negative stationary weight");
        if (x < 0) x = 0;
    }
    return mu;
}

double stationarity_residual(const BinaryMeasure& pi, const OpenAsepRates& rates) {
    const int n = pi.m;
    std::vector<double> res(pi.weights.size(), 0.0);
    for (uint32_t s = 0; s < (1u << n); ++s) {
        const double p = pi.weights[s];
        for_each_transition(s, n, rates, [&](uint32_t s2, double rate) {
            res[s2] += p * rate;
            res[s] -= p * rate;
        });
    }
    double worst = 0;
    for (double r : res) worst = std::max(worst, std::abs(r));
    return worst;
}

SolveDiagnostics stationary_diagnostics(int n, const OpenAsepRates& rates) {
    validate_rates(rates);
    if (n > 8) throw Error(Err::CAP_EXCEEDED, "diagnostics use dense SVD; n <= 8");
    const long N = 1L << n;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N + 1, N);
    for (uint32_t s = 0; s < (uint32_t)N; ++s)
        for_each_transition(s, n, rates, [&](uint32_t s2, double rate) {
            M((long)s2, (long)s) += rate;
            M((long)s, (long)s) -= rate;
        });
    for (long j = 0; j < N; ++j) M(N, j) = 1.0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    SolveDiagnostics d{};
    d.sigma_second_smallest = sv(sv.size() - 2);
    d.residual = stationarity_residual(stationary_measure(n, rates), rates);
    return d;
}

std::string to_json(const OpenAsepRates& r) {
    BoundaryParams p = rates_to_boundary(r);
    json j;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["gamma"] = r.gamma;
    j["delta"] = r.delta;
    j["q"] = r.q;
    j["derived"] = {{"A", p.A}, {"B", p.B}, {"C", p.C}, {"D", p.D}};
    return j.dump();
}

std::string to_json(const BoundaryParams& p) {
    OpenAsepRates r = boundary_to_rates(p);
    json j;
    j["A"] = p.A;
    j["B"] = p.B;
    j["C"] = p.C;
    j["D"] = p.D;
    j["q"] = p.q;
    j["derived"] = {{"alpha", r.alpha}, {"beta", r.beta}, {"gamma", r.gamma}, {"delta", r.delta}};
    return j.dump();
}

std::string to_json(const BinaryMeasure& mu) {
    json j;
    j["m"] = mu.m;
    j["kind"] = mu.kind == BinaryMeasure::Kind::Probability ? "probability" : "signed";
    j["weights"] = mu.weights;
    return j.dump();
}

std::string to_csv(const BinaryMeasure& mu) {
    std::string out = "word,weight\n";
    char buf[64];
    for (uint32_t w = 0; w < (1u << mu.m); ++w) {
        std::string bits(mu.m, '0');
        for (int i = 0; i < mu.m; ++i)
            if (w & (1u << i)) bits[i] = '1';
        std::snprintf(buf, sizeof buf, ",%.17g\n", mu.weights[w]);
        out += bits + buf;
    }
    return out;
}

BinaryMeasure binary_measure_from_json(const std::string& text) {
    json j = json::parse(text);
    return BinaryMeasure::from_weights(
        j.at("m").get<int>(), j.at("weights").get<std::vector<double>>(),
        j.at("kind").get<std::string>() == "signed" ? BinaryMeasure::Kind::Signed
                                                    : BinaryMeasure::Kind::Probability);
}

}  // namespace aseplab
