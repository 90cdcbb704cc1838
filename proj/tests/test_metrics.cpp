#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "psqi/metrics.hpp"
#include "psqi/noise.hpp"

#include <algorithm>

using namespace psqi;

TEST_CASE("identical peak lists match perfectly") {
    const PeakList peaks{{100, 350, 600}};
    const MatchResult m = match_peaks(peaks, peaks, 0.02, 1000.0);
    CHECK(m.tp == 3);
    CHECK(m.fp == 0);
    CHECK(m.fn == 0);
    CHECK(f1_score(m) == 1.0);
}

TEST_CASE("detection outside the tolerance is a false positive") {
    const MatchResult m = match_peaks(PeakList{{100}}, PeakList{{100, 150}}, 0.02, 1000.0);
    CHECK(m.tp == 1);
    CHECK(m.fp == 1);
    CHECK(m.fn == 0);
    CHECK(f1_score(m) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("chronological matching gives the earlier reference priority") {
    const MatchResult m = match_peaks(PeakList{{100, 118}}, PeakList{{109}}, 0.02, 1000.0);
    CHECK(m.tp == 1);
    CHECK(m.fn == 1);
    CHECK(m.fp == 0);
    REQUIRE(m.matched_pairs.size() == 1);
    CHECK(m.matched_pairs[0].first == 100);
    CHECK(m.matched_pairs[0].second == 109);
}

TEST_CASE("empty versus empty scores one") {
    const MatchResult m = match_peaks(PeakList{}, PeakList{}, 0.02, 250.0);
    CHECK(m.tp == 0);
    CHECK(f1_score(m) == 1.0);
}

TEST_CASE("binary accuracy") {
    CHECK(binary_accuracy(BinaryLabel{1}, BinaryLabel{1}) == 1.0);
    CHECK(binary_accuracy(BinaryLabel{0}, BinaryLabel{1}) == 0.0);
    CHECK(binary_accuracy(BinaryLabel{0}, BinaryLabel{0}) == 1.0);
}

namespace {

// Random matching instance with disjoint tolerance windows: consecutive
// references are separated by more than 2 * tolerance samples.
struct Instance {
    PeakList reference;
    PeakList detected;
};

Instance random_instance(SplitMix64& rng, long long tol_samples) {
    Instance inst;
    const std::size_t n_ref = rng.next_u64() % 9; // up to 8
    std::size_t pos = 50;
    for (std::size_t i = 0; i < n_ref; ++i) {
        pos += 2 * static_cast<std::size_t>(tol_samples) + 1 + rng.next_u64() % 100;
        inst.reference.indices.push_back(pos);
    }
    // Detections: jittered copies (some outside tolerance) plus extras.
    std::vector<std::size_t> det;
    for (std::size_t r : inst.reference.indices) {
        if (rng.next_unit() < 0.85) {
            const long long jitter = static_cast<long long>(rng.next_u64() % (2 * tol_samples + 10)) -
                                     (tol_samples + 5);
            const long long idx = static_cast<long long>(r) + jitter;
            if (idx > 0) det.push_back(static_cast<std::size_t>(idx));
        }
    }
    const std::size_t extras = rng.next_u64() % 3;
    for (std::size_t i = 0; i < extras; ++i) {
        det.push_back(10 + rng.next_u64() % (pos + 100));
    }
    std::sort(det.begin(), det.end());
    det.erase(std::unique(det.begin(), det.end()), det.end());
    inst.detected.indices = det;
    return inst;
}

} // namespace

TEST_CASE("greedy matching equals brute-force maximum matching on disjoint windows") {
    const double fs = 1000.0;
    const double tol_s = 0.02;
    const long long tol = 20;
    SplitMix64 rng(99);
    for (int rep = 0; rep < 500; ++rep) {
        const Instance inst = random_instance(rng, tol);
        const MatchResult greedy = match_peaks(inst.reference, inst.detected, tol_s, fs);
        const std::size_t best = oracle::max_matching_tp(inst.reference, inst.detected, tol_s, fs);
        CHECK(greedy.tp == best);
    }
}

TEST_CASE("matching invariants on random instances") {
    const double fs = 500.0;
    SplitMix64 rng(123);
    for (int rep = 0; rep < 200; ++rep) {
        const Instance inst = random_instance(rng, 10);
        const MatchResult m = match_peaks(inst.reference, inst.detected, 0.02, fs);

        CHECK(m.tp <= std::min(inst.reference.indices.size(), inst.detected.indices.size()));
        CHECK(m.tp + m.fn == inst.reference.indices.size());
        CHECK(m.tp + m.fp == inst.detected.indices.size());

        // Every pair respects the tolerance and no index repeats.
        std::vector<std::size_t> refs_used, dets_used;
        for (const auto& [r, d] : m.matched_pairs) {
            CHECK(std::llabs(static_cast<long long>(r) - static_cast<long long>(d)) <= 10);
            refs_used.push_back(r);
            dets_used.push_back(d);
        }
        std::sort(refs_used.begin(), refs_used.end());
        std::sort(dets_used.begin(), dets_used.end());
        CHECK(std::adjacent_find(refs_used.begin(), refs_used.end()) == refs_used.end());
        CHECK(std::adjacent_find(dets_used.begin(), dets_used.end()) == dets_used.end());

        // Adding one detection never decreases tp.
        PeakList extended = inst.detected;
        extended.indices.push_back(inst.reference.indices.empty()
                                       ? 5000
                                       : inst.reference.indices.back() + 1);
        std::sort(extended.indices.begin(), extended.indices.end());
        extended.indices.erase(std::unique(extended.indices.begin(), extended.indices.end()),
                               extended.indices.end());
        const MatchResult m2 = match_peaks(inst.reference, extended, 0.02, fs);
        CHECK(m2.tp >= m.tp);
    }
}

TEST_CASE("peak list validation") {
    CHECK_THROWS_AS(validate_peak_list(PeakList{{5, 5}}, 100), std::invalid_argument);
    CHECK_THROWS_AS(validate_peak_list(PeakList{{7, 3}}, 100), std::invalid_argument);
    CHECK_THROWS_AS(validate_peak_list(PeakList{{150}}, 100), std::invalid_argument);
    CHECK_NOTHROW(validate_peak_list(PeakList{{1, 2, 99}}, 100));
}
