#include "pcgt/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

namespace pcgt {

namespace {

constexpr double kZ99 = 2.5758293035489004; // Phi^-1(0.995)

// Stream tags keep the per-sample generators of different estimators apart.
enum StreamTag : std::uint64_t { TagInH = 1, TagPairing = 2, TagBackbase = 3 };

std::uint64_t stream_id(std::uint64_t tag, std::uint64_t param, std::uint64_t index) {
    return (tag << 56) ^ (param << 40) ^ index;
}

// Deterministic, worker-count independent parallel counting: sample i is a
// pure function of (seed, stream), so any partition over workers gives the
// same totals.
template <class Fn>
std::uint64_t parallel_count(std::uint64_t samples, unsigned workers, Fn&& hit) {
    if (workers <= 1) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < samples; ++i)
            if (hit(i)) ++hits;
        return hits;
    }
    std::vector<std::uint64_t> partial(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            std::uint64_t lo = samples * w / workers;
            std::uint64_t hi = samples * (w + 1) / workers;
            std::uint64_t hits = 0;
            for (std::uint64_t i = lo; i < hi; ++i)
                if (hit(i)) ++hits;
            partial[w] = hits;
        });
    }
    for (auto& t : pool) t.join();
    std::uint64_t total = 0;
    for (auto h : partial) total += h;
    return total;
}

ExperimentReport make_report(std::string measure, double param, std::uint64_t samples,
                             std::uint64_t hits, double bound, std::uint64_t seed) {
    ExperimentReport r;
    r.measure = std::move(measure);
    r.param = param;
    r.samples = samples;
    r.hits = hits;
    r.estimate = samples ? double(hits) / double(samples) : 0.0;
    WilsonInterval ci = wilson99(hits, samples);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    r.bound = bound;
    r.seed = seed;
    return r;
}

} // namespace

WilsonInterval wilson99(std::uint64_t hits, std::uint64_t samples) {
    if (samples == 0) return {0.0, 1.0};
    const double n = double(samples);
    const double p = double(hits) / n;
    const double z2 = kZ99 * kZ99;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2 * n)) / denom;
    const double half = kZ99 * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    WilsonInterval out;
    out.low = hits == 0 ? 0.0 : std::max(0.0, center - half);
    out.high = hits == samples ? 1.0 : std::min(1.0, center + half);
    return out;
}

std::string csv_header() {
    return "measure,param,samples,hits,estimate,ci_low,ci_high,bound,seed";
}

std::string csv_row(const ExperimentReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%g,%llu,%llu,%.6g,%.6g,%.6g,%.6g,%llu",
                  r.measure.c_str(), r.param,
                  static_cast<unsigned long long>(r.samples),
                  static_cast<unsigned long long>(r.hits), r.estimate, r.ci_low, r.ci_high,
                  r.bound, static_cast<unsigned long long>(r.seed));
    return buf;
}

ExperimentReport estimate_in_h(const Measure& measure, std::uint64_t samples,
                               std::uint64_t seed, unsigned workers) {
    constexpr std::size_t kDelta = 4; // b, b-bar, a, a-bar
    auto hit = [&](std::uint64_t i) {
        thread_local std::vector<std::uint8_t> letters;
        Rng rng(seed, stream_id(TagInH, measure.param, i));
        sample_letters(measure, kDelta, rng, letters);
        return in_h_letters(letters);
    };
    std::uint64_t hits = parallel_count(samples, workers, hit);
    double bound = std::numeric_limits<double>::quiet_NaN();
    std::string name;
    switch (measure.kind) {
    case MeasureKind::MuM:
        name = "mu_m";
        if (measure.param % 2 == 0)
            bound = std::pow(8.0 / 9.0, measure.param / 2.0);
        break;
    case MeasureKind::ReducedUniform: name = "reduced_uniform"; break;
    case MeasureKind::UniformDeltaN: name = "uniform_delta_n"; break;
    case MeasureKind::UniformDeltaMuM: name = "uniform_mu_m"; break;
    }
    return make_report(name, measure.param, samples, hits, bound, seed);
}

std::vector<PairingReport> estimate_pairing_bounds(unsigned n, std::uint64_t samples,
                                                   std::uint64_t seed, unsigned workers) {
    if (n > 6) throw std::invalid_argument("pairing estimates capped at n = 6");
    std::vector<DyckWord> dycks = enumerate_dyck(n);
    const std::size_t dn = dycks.size();
    // One sample batch shared by all bracket words; per-word counters.
    std::vector<std::uint64_t> match_hits(dn, 0), succ_hits(dn, 0);
    std::mutex merge_mutex;
    unsigned used = std::max(1u, workers);
    std::vector<std::thread> pool;
    Measure measure = Measure::mu_m(2 * n);
    for (unsigned w = 0; w < used; ++w) {
        pool.emplace_back([&, w] {
            std::vector<std::uint64_t> m(dn, 0), s(dn, 0);
            std::vector<std::uint8_t> letters;
            std::uint64_t lo = samples * w / used;
            std::uint64_t hi = samples * (w + 1) / used;
            for (std::uint64_t i = lo; i < hi; ++i) {
                Rng rng(seed, stream_id(TagPairing, n, i));
                sample_letters(measure, 4, rng, letters);
                for (std::size_t di = 0; di < dn; ++di) {
                    if (!dyck_matches(letters, dycks[di])) continue;
                    ++m[di];
                    if (dyck_successful(letters, dycks[di])) ++s[di];
                }
            }
            std::lock_guard<std::mutex> lock(merge_mutex);
            for (std::size_t di = 0; di < dn; ++di) {
                match_hits[di] += m[di];
                succ_hits[di] += s[di];
            }
        });
    }
    for (auto& t : pool) t.join();

    std::vector<PairingReport> out;
    out.reserve(dn);
    for (std::size_t di = 0; di < dn; ++di) {
        const DyckWord& d = dycks[di];
        int k = d.adjacent_pairs;
        double match_bound = std::pow(2.0 / 3.0, double(n - k)) * std::pow(2.0 / 9.0, double(k));
        double succ_bound = std::pow(5.0 / 16.0, double(n - k));
        PairingReport pr;
        pr.d = d;
        pr.match = make_report("pairing_match_" + d.brackets, n, samples, match_hits[di],
                               match_bound, seed);
        pr.successful = make_report("pairing_success_" + d.brackets, n, match_hits[di],
                                    succ_hits[di], succ_bound, seed);
        out.push_back(std::move(pr));
    }
    return out;
}

ExperimentReport estimate_back_to_base(HnnKind kind, unsigned n, std::uint64_t samples,
                                       std::uint64_t seed, unsigned workers) {
    return estimate_back_to_base(builtin_instance(kind), n, samples, seed, workers);
}

ExperimentReport estimate_back_to_base(const HnnInstance& inst, unsigned n,
                                       std::uint64_t samples, std::uint64_t seed,
                                       unsigned workers) {
    const std::size_t delta = inst.delta_size();
    Measure measure = Measure::uniform_delta_n(n);
    auto hit = [&](std::uint64_t i) {
        thread_local std::vector<std::uint8_t> letters;
        Rng rng(seed, stream_id(TagBackbase, n, i));
        sample_letters(measure, delta, rng, letters);
        WalkOutcome out = hnn_walk(inst, letters, false);
        if (out.overflow) {
            if (inst.kind() == HnnKind::Bg) return bg_walk_exact(letters, false).in_h;
            throw CircuitError("walk overflow outside the exact-fallback instance");
        }
        return out.in_h;
    };
    std::uint64_t hits = parallel_count(samples, workers, hit);
    double bound = n > 0 ? std::sqrt(double(delta) / double(n)) : 1.0;
    return make_report(std::string("backbase_") + inst.name(), n, samples, hits, bound, seed);
}

ExperimentReport estimate_back_to_base_conditional(HnnKind kind, unsigned m,
                                                   std::uint64_t samples, std::uint64_t seed,
                                                   unsigned workers) {
    return estimate_back_to_base_conditional(builtin_instance(kind), m, samples, seed, workers);
}

ExperimentReport estimate_back_to_base_conditional(const HnnInstance& inst, unsigned m,
                                                   std::uint64_t samples, std::uint64_t seed,
                                                   unsigned workers) {
    const std::size_t delta = inst.delta_size();
    Measure measure = Measure::uniform_mu_m(m);
    auto hit = [&](std::uint64_t i) {
        thread_local std::vector<std::uint8_t> letters;
        Rng rng(seed, stream_id(TagBackbase, 0x100000u | m, i));
        sample_letters(measure, delta, rng, letters);
        WalkOutcome out = hnn_walk(inst, letters, false);
        if (out.overflow) {
            if (inst.kind() == HnnKind::Bg) return bg_walk_exact(letters, false).in_h;
            throw CircuitError("walk overflow outside the exact-fallback instance");
        }
        return out.in_h;
    };
    std::uint64_t hits = parallel_count(samples, workers, hit);
    double d4 = std::pow(double(delta), 4.0);
    double bound = std::pow(1.0 - 4.0 / d4, m / 2.0);
    return make_report(std::string("backbase_cond_") + inst.name(), m, samples, hits, bound,
                       seed);
}

} // namespace pcgt
