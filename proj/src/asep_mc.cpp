#include "aseplab/asep_mc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "json.hpp"

namespace aseplab {

namespace {

// fixed mapping from raw 64-bit draws to (0,1); keeps runs byte-identical
// across standard libraries
inline double unit_open(std::mt19937_64& rng) {
    return (double(rng() >> 11) + 0.5) * 0x1.0p-53;
}

struct Move {
    uint32_t target;
    double rate;
};

int enabled_moves(uint32_t s, int n, const OpenAsepRates& r, std::vector<Move>& out) {
    out.clear();
    const uint32_t last = 1u << (n - 1);
    if (!(s & 1u)) out.push_back({s | 1u, r.alpha});
    if ((s & 1u) && r.gamma > 0) out.push_back({s & ~1u, r.gamma});
    if ((s & last)) out.push_back({s & ~last, r.beta});
    if (!(s & last) && r.delta > 0) out.push_back({s | last, r.delta});
    for (int i = 0; i + 1 < n; ++i) {
        const uint32_t bi = 1u << i, bj = 1u << (i + 1);
        const bool oi = s & bi, oj = s & bj;
        if (oi && !oj) out.push_back({(s & ~bi) | bj, 1.0});
        if (oj && !oi && r.q > 0) out.push_back({(s & ~bj) | bi, r.q});
    }
    return (int)out.size();
}

}  // namespace

std::string Statistic::label() const {
    if (type == Type::SiteOccupation) return "site:" + std::to_string(site);
    std::string bits(k, '0');
    for (int i = 0; i < k; ++i)
        if (word & (1u << i)) bits[i] = '1';
    return "word:" + bits;
}

double default_burn_in(int n, const OpenAsepRates& rates) {
    double least = rates.alpha;
    least = std::min(least, rates.beta);
    if (rates.gamma > 0) least = std::min(least, rates.gamma);
    if (rates.delta > 0) least = std::min(least, rates.delta);
    return 20.0 * n / least;
}

McEstimate simulate_estimate(int n, const OpenAsepRates& rates, const Statistic& stat,
                             double total_time, double burn_in, uint64_t seed) {
    if (n < 1 || n > 30) throw Error(Err::DOMAIN, "n out of range");
    if (!(total_time > burn_in)) throw Error(Err::DOMAIN, "total_time must exceed burn_in");

    auto value = [&](uint32_t s) -> int {
        if (stat.type == Statistic::Type::SiteOccupation)
            return (s >> (stat.site - 1)) & 1u;
        return (s & ((1u << stat.k) - 1u)) == stat.word;
    };

    std::mt19937_64 rng(seed);
    uint32_t state = 0;
    double t = 0;
    long events = 0;

    const int n_batches = 32;
    const double span = total_time - burn_in;
    const double batch_len = span / n_batches;
    std::vector<double> batch(n_batches, 0.0);

    // accumulate v * dt into the batch windows covering [from, to)
    auto accumulate = [&](double from, double to, int v) {
        if (!v) return;
        from = std::max(from, burn_in);
        if (to <= from) return;
        int b0 = std::min(n_batches - 1, (int)((from - burn_in) / batch_len));
        int b1 = std::min(n_batches - 1, (int)((to - burn_in) / batch_len));
        for (int b = b0; b <= b1; ++b) {
            double lo = burn_in + b * batch_len, hi = lo + batch_len;
            batch[b] += std::min(to, hi) - std::max(from, lo);
        }
    };

    std::vector<Move> moves;
    moves.reserve(2 * n + 4);
    while (t < total_time) {
        enabled_moves(state, n, rates, moves);
        double total_rate = 0;
        for (const Move& m : moves) total_rate += m.rate;
        const double wait = -std::log(unit_open(rng)) / total_rate;
        const double t_next = t + wait;
        accumulate(t, std::min(t_next, total_time), value(state));
        if (t_next >= total_time) break;
        double u = unit_open(rng) * total_rate;
        uint32_t next = moves.back().target;
        for (const Move& m : moves) {
            u -= m.rate;
            if (u <= 0) {
                next = m.target;
                break;
            }
        }
        state = next;
        t = t_next;
        if (t >= burn_in) ++events;
    }

    McEstimate est;
    est.label = stat.label();
    est.seed = seed;
    est.burn_in = burn_in;
    est.samples = events;
    est.batches = n_batches;
    double mean = 0;
    for (double& b : batch) {
        b /= batch_len;
        mean += b;
    }
    mean /= n_batches;
    double var = 0;
    for (double b : batch) var += (b - mean) * (b - mean);
    est.mean = mean;
    est.stderr_ = std::sqrt(var / (double(n_batches) * (n_batches - 1)));
    return est;
}

std::string McEstimate::to_json_line() const {
    nlohmann::ordered_json j;
    j["label"] = label;
    j["mean"] = mean;
    j["stderr"] = stderr_;
    j["samples"] = samples;
    j["seed"] = seed;
    return j.dump();
}

}  // namespace aseplab
