#pragma once

// Exact open ASEP machinery: the (alpha,beta,gamma,delta,q) and (A,B,C,D,q)
// parameterizations, phase classification, the 2^n-state generator and its
// stationary measure, marginals, generating functions and particle-hole
// duality. Serves as the ground-truth oracle for every limit claim.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aseplab/errors.hpp"

namespace aseplab {

struct OpenAsepRates {
    double alpha, beta;   // > 0
    double gamma, delta;  // >= 0
    double q;             // in [0,1)
};

struct BoundaryParams {
    double A, C;  // >= 0
    double B, D;  // in (-1, 0]
    double q;
};

// phi_pm(x,y) = (1 - q - x + y +- sqrt((1-q-x+y)^2 + 4xy)) / (2x)
double phi_plus(double x, double y, double q);
double phi_minus(double x, double y, double q);

BoundaryParams rates_to_boundary(const OpenAsepRates& r);
OpenAsepRates boundary_to_rates(const BoundaryParams& p);

enum class Phase { LD, HD, MC, BOUNDARY };
enum class Region { FAN, SHOCK, BOUNDARY };

struct PhaseInfo {
    Phase phase;
    Region region;
    std::optional<double> theta;     // decay rate, LD/HD only
    std::optional<double> budget_s;  // -ln(theta)/3
};

const char* phase_name(Phase p);
const char* region_name(Region r);

// theta = (1 + y_0^*(1)) / (1 + y_0(1)) read off the support of
// nu(.; A,B,C,D); the measure is symmetric in its slots so the same support
// serves both phases.
double theta_from_pi1_support(double A, double B, double C, double D, double q,
                              double mass_tol = 1e-12);

// Labels use relative tolerance 1e-9; points within it of a phase or region
// boundary are labeled BOUNDARY. theta/budget are filled for LD/HD (B=D=0).
PhaseInfo classify_phase(double A, double C, double q);

// ---------------------------------------------------------------------------
// Measures on {0,1}^m. Site i is bit i-1 of the word index; weights are
// stored in increasing word order.
// ---------------------------------------------------------------------------

struct BinaryMeasure {
    enum class Kind { Probability, Signed };

    int m = 0;
    Kind kind = Kind::Probability;
    std::vector<double> weights;  // size 2^m

    static BinaryMeasure zero(int m, Kind kind = Kind::Probability);
    // validates the sum-to-1 invariant; probability kind clamps negatives
    // down to -1e-12 and rejects anything below
    static BinaryMeasure from_weights(int m, std::vector<double> w,
                                      Kind kind = Kind::Probability);

    double& at(uint32_t word) { return weights[word]; }
    double at(uint32_t word) const { return weights[word]; }
};

enum class MarginalSide { FIRST, LAST };

// Sums out the complementary sites; FIRST keeps sites 1..m, LAST keeps the
// last m sites.
BinaryMeasure marginal(const BinaryMeasure& mu, MarginalSide side, int m);

// E[prod t_i^{tau_i}]
double generating_function(const BinaryMeasure& mu, const std::vector<double>& t);

// weight of (tau_1..tau_n) in the output equals the weight of
// (1-tau_n, ..., 1-tau_1) in the input
BinaryMeasure particle_hole_dual(const BinaryMeasure& mu);

// ---------------------------------------------------------------------------
// Stationary measure
// ---------------------------------------------------------------------------

struct SolveOptions {
    int cap = 14;              // max n (2^n dense solve)
    bool extended = false;     // long double LU
    double residual_tol = 1e-10;
};

// Builds the 2^n-state generator (bulk hops 1 and q, boundary rates
// alpha,gamma left and delta,beta right, occupied targets blocked) and
// solves for the stationary probability vector.
BinaryMeasure stationary_measure(int n, const OpenAsepRates& rates, const SolveOptions& = {});

// max_s' |sum_s pi_s Q[s][s']| over the full generator
double stationarity_residual(const BinaryMeasure& pi, const OpenAsepRates& rates);

struct SolveDiagnostics {
    double residual;
    double sigma_second_smallest;  // of the (2^n+1)-row augmented system
};
// Dense SVD of the augmented system; intended for n <= 8.
SolveDiagnostics stationary_diagnostics(int n, const OpenAsepRates& rates);

// Serialization (formats shared with the CLI)
std::string to_json(const OpenAsepRates& r);
std::string to_json(const BoundaryParams& p);
std::string to_json(const BinaryMeasure& mu);
std::string to_csv(const BinaryMeasure& mu);
BinaryMeasure binary_measure_from_json(const std::string& text);

}  // namespace aseplab
