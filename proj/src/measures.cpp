#include "pcgt/measures.hpp"

#include <stdexcept>

namespace pcgt {

namespace {

// Uniform over the delta letters distinct from `avoid` (the cancelling one).
std::uint8_t next_non_cancelling(std::size_t delta_size, std::uint8_t avoid, Rng& rng) {
    std::uint8_t l = static_cast<std::uint8_t>(rng.below(delta_size - 1));
    if (l >= avoid) ++l;
    return l;
}

} // namespace

void sample_letters(const Measure& measure, std::size_t delta_size, Rng& rng,
                    std::vector<std::uint8_t>& out) {
    out.clear();
    switch (measure.kind) {
    case MeasureKind::UniformDeltaN:
        out.reserve(measure.param);
        for (unsigned i = 0; i < measure.param; ++i)
            out.push_back(static_cast<std::uint8_t>(rng.below(delta_size)));
        return;
    case MeasureKind::ReducedUniform: {
        if (measure.param == 0) return;
        out.reserve(measure.param);
        std::uint8_t prev = static_cast<std::uint8_t>(rng.below(delta_size));
        out.push_back(prev);
        for (unsigned i = 1; i < measure.param; ++i) {
            prev = next_non_cancelling(delta_size, prev ^ 1, rng);
            out.push_back(prev);
        }
        return;
    }
    case MeasureKind::MuM: {
        if (measure.param == 0) throw std::invalid_argument("mu_m requires m >= 1");
        std::uint8_t prev = rng.coin() ? 1 : 0;
        out.push_back(prev);
        unsigned betas = 1;
        for (;;) {
            std::uint8_t l = next_non_cancelling(delta_size, prev ^ 1, rng);
            if (l < 2 && betas == measure.param) return; // stop before emitting
            out.push_back(l);
            if (l < 2) ++betas;
            prev = l;
        }
    }
    case MeasureKind::UniformDeltaMuM: {
        if (measure.param == 0) throw std::invalid_argument("mu_m requires m >= 1");
        unsigned betas = 0;
        for (;;) {
            std::uint8_t l = static_cast<std::uint8_t>(rng.below(delta_size));
            if (l < 2 && betas == measure.param) return;
            out.push_back(l);
            if (l < 2) ++betas;
        }
    }
    }
}

void sample_mu_sigma(std::size_t delta_size, Rng& rng, std::vector<std::uint8_t>& out) {
    out.clear();
    for (;;) {
        std::uint8_t l = static_cast<std::uint8_t>(rng.below(delta_size));
        if (l < 2) return; // "stop" outcomes, probability 2/|Delta|
        out.push_back(l);
    }
}

} // namespace pcgt
