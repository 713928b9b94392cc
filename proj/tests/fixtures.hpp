#ifndef CWRU_TESTS_FIXTURES_HPP
#define CWRU_TESTS_FIXTURES_HPP

// Synthetic stand-ins for the 114-record catalog: every condition, load and
// accelerometer combination, with short signals whose statistics optionally
// depend on the label so that models can separate the classes.

#include <cmath>
#include <numbers>
#include <vector>

#include "cwru/catalog.hpp"
#include "cwru/prng.hpp"

namespace cwru::testfix {

// Per-label mean offsets make the three detectors separable after pooled
// z-score normalization (which only removes one global mean/scale).
inline double label_offset(const std::array<std::uint8_t, 3>& label) {
    if (label[0]) return 3.0;    // inner
    if (label[1]) return -3.0;   // outer
    if (label[2]) return 1.5;    // ball
    return 0.0;
}

inline std::vector<catalog::SignalRecord> make_records(std::size_t samples = 2048,
                                                       bool separable = false,
                                                       std::uint64_t noise_seed = 1234) {
    SplitMix64 rng(noise_seed);
    std::vector<catalog::SignalRecord> records;
    for (const auto& cond : catalog::all_conditions()) {
        for (int load : catalog::kLoadsHp) {
            for (auto acc : {catalog::Accelerometer::DE, catalog::Accelerometer::FE}) {
                catalog::SignalRecord rec;
                rec.condition = cond;
                rec.accelerometer = acc;
                rec.load_hp = load;
                rec.label = catalog::make_label(cond, acc);
                rec.samples.resize(samples);
                const double offset = separable ? label_offset(rec.label) : 0.0;
                for (auto& v : rec.samples) v = offset + (2.0 * rng.next_double() - 1.0);
                records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

}  // namespace cwru::testfix

#endif  // CWRU_TESTS_FIXTURES_HPP
