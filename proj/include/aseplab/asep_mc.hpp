#pragma once

// Continuous-time Gillespie simulation of open ASEP -- the stochastic oracle
// for the exact solver. Deliberately independent of the generator code in
// asep_exact: transitions are enumerated from the rates directly.

#include <cstdint>
#include <string>

#include "aseplab/asep_exact.hpp"

namespace aseplab {

struct Statistic {
    enum class Type { SiteOccupation, WordFirstK };
    Type type = Type::SiteOccupation;
    int site = 1;       // 1-based, SiteOccupation
    int k = 1;          // prefix length, WordFirstK
    uint32_t word = 0;  // target word, site i = bit i-1

    std::string label() const;
    static Statistic site_occupation(int site) { return {Type::SiteOccupation, site, 0, 0}; }
    static Statistic word_first_k(int k, uint32_t word) {
        return {Type::WordFirstK, 0, k, word};
    }
};

struct McEstimate {
    std::string label;
    double mean = 0;
    double stderr_ = 0;  // batch means, >= 20 batches
    long samples = 0;    // events observed after burn-in
    int batches = 0;
    uint64_t seed = 0;
    double burn_in = 0;

    std::string to_json_line() const;
};

// crude relaxation heuristic; overridable by passing burn_in explicitly
double default_burn_in(int n, const OpenAsepRates& rates);

// Exact-in-law continuous-time simulation: exponential clocks per enabled
// transition, cumulative-rate inversion per event, time-averaged statistic
// after burn-in. Deterministic given the seed.
McEstimate simulate_estimate(int n, const OpenAsepRates& rates, const Statistic& stat,
                             double total_time, double burn_in, uint64_t seed);

}  // namespace aseplab
