#pragma once

#include <string>
#include <vector>

#include "pcgt/dyck.hpp"
#include "pcgt/hnn.hpp"
#include "pcgt/measures.hpp"

namespace pcgt {

// Two-sided 99% score interval; valid near zero proportions.
struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};
WilsonInterval wilson99(std::uint64_t hits, std::uint64_t samples);

struct ExperimentReport {
    std::string measure;
    double param = 0;
    std::uint64_t samples = 0;
    std::uint64_t hits = 0;
    double estimate = 0;
    double ci_low = 0;
    double ci_high = 0;
    double bound = 0; // applicable theoretical reference, NaN when none
    std::uint64_t seed = 0;
};

std::string csv_header();
std::string csv_row(const ExperimentReport& r);

// Monte-Carlo estimate of Pr[word reduces into the base group] under the
// given measure over the 4-letter alphabet {b, b-bar, a, a-bar}.  For
// mu_{2n} runs the bound column carries (8/9)^n.
ExperimentReport estimate_in_h(const Measure& measure, std::uint64_t samples,
                               std::uint64_t seed, unsigned workers);

// For every bracket word d of half-length n: empirical Pr[matches] against
// (2/3)^{n-k} (2/9)^k and Pr[successful | matches] against (5/16)^{n-k}.
struct PairingReport {
    DyckWord d;
    ExperimentReport match;      // unconditional
    ExperimentReport successful; // conditional on match
};
std::vector<PairingReport> estimate_pairing_bounds(unsigned n, std::uint64_t samples,
                                                   std::uint64_t seed, unsigned workers);

// Pr[walk of n uniform letters ends in the base group] for an instance;
// bound column: sqrt(|Delta|/n) for the two amenable-type regimes, and for
// the conditional variant (exactly m stable letters) the decay bound
// (1 - 4/|Delta|^4)^{m/2}.
ExperimentReport estimate_back_to_base(const HnnInstance& inst, unsigned n,
                                       std::uint64_t samples, std::uint64_t seed,
                                       unsigned workers);
ExperimentReport estimate_back_to_base_conditional(const HnnInstance& inst, unsigned m,
                                                   std::uint64_t samples, std::uint64_t seed,
                                                   unsigned workers);
ExperimentReport estimate_back_to_base(HnnKind kind, unsigned n, std::uint64_t samples,
                                       std::uint64_t seed, unsigned workers);
ExperimentReport estimate_back_to_base_conditional(HnnKind kind, unsigned m,
                                                   std::uint64_t samples, std::uint64_t seed,
                                                   unsigned workers);

} // namespace pcgt
