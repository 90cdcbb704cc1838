#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "test_helpers.hpp"

#include "psqi/filter.hpp"
#include "psqi/noise.hpp"
#include "psqi/signal.hpp"

#include <cmath>
#include <numbers>

using namespace psqi;

TEST_CASE("lowpass DC gain is exactly one") {
    const FilterCoefficients lp = design_butterworth(FilterSpec::lowpass(6, 10.0), 100.0);
    CHECK(filter_magnitude(lp, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(filter_is_stable(lp));
}

TEST_CASE("highpass blocks DC") {
    const FilterCoefficients hp = design_butterworth(FilterSpec::highpass(6, 0.5), 100.0);
    CHECK(filter_magnitude(hp, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(filter_is_stable(hp));
}

TEST_CASE("bandpass cutoffs sit at the -3 dB point") {
    const FilterCoefficients bp = design_butterworth(FilterSpec::bandpass(6, 5.0, 15.0), 100.0);
    const double target = 1.0 / std::sqrt(2.0);
    CHECK(filter_magnitude(bp, 5.0) == doctest::Approx(target).epsilon(1e-6));
    CHECK(filter_magnitude(bp, 15.0) == doctest::Approx(target).epsilon(1e-6));
    CHECK(filter_is_stable(bp));
}

TEST_CASE("designed responses match the analytic Butterworth magnitude") {
    const double fs = 250.0;
    const FilterSpec specs[] = {
        FilterSpec::lowpass(6, 20.0),
        FilterSpec::lowpass(3, 40.0),
        FilterSpec::highpass(6, 0.5),
        FilterSpec::highpass(5, 2.0),
        FilterSpec::bandpass(6, 5.0, 15.0),
        FilterSpec::bandpass(3, 8.0, 20.0),
        FilterSpec::bandpass(6, 0.4, 110.0), // nearly the full admissible band
    };
    for (const FilterSpec& spec : specs) {
        const FilterCoefficients coeffs = design_butterworth(spec, fs);
        REQUIRE(filter_is_stable(coeffs));
        for (int k = 1; k < 128; ++k) {
            const double f = 0.5 * fs * k / 128.0;
            const double expected = oracle::butterworth_magnitude(spec, fs, f);
            CHECK(filter_magnitude(coeffs, f) == doctest::Approx(expected).epsilon(1e-8));
        }
    }
}

TEST_CASE("lowpass magnitude is non-increasing on a frequency grid") {
    const FilterCoefficients lp = design_butterworth(FilterSpec::lowpass(6, 10.0), 100.0);
    double prev = filter_magnitude(lp, 0.0);
    for (int k = 1; k < 512; ++k) {
        const double mag = filter_magnitude(lp, 50.0 * k / 512.0);
        CHECK(mag <= prev + 1e-9);
        prev = mag;
    }
}

TEST_CASE("design rejects invalid parameters") {
    CHECK_THROWS_AS(design_butterworth(FilterSpec::lowpass(0, 10.0), 100.0), std::invalid_argument);
    CHECK_THROWS_AS(design_butterworth(FilterSpec::lowpass(6, 0.0), 100.0), std::invalid_argument);
    CHECK_THROWS_AS(design_butterworth(FilterSpec::lowpass(6, 50.0), 100.0), std::invalid_argument);
    CHECK_THROWS_AS(design_butterworth(FilterSpec::bandpass(6, 15.0, 5.0), 100.0),
                    std::invalid_argument);
}

TEST_CASE("filtfilt removes a constant through the baseline highpass") {
    const FilterCoefficients hp = design_butterworth(FilterSpec::highpass(6, 0.5), 100.0);
    const Signal x = testing::constant(5.0, 100.0, 10.0);
    const Signal y = filtfilt(hp, x);
    REQUIRE(y.samples.size() == x.samples.size());
    CHECK(testing::max_abs(y.samples) < 1e-6 * 5.0);
}

TEST_CASE("filtfilt matches the b/a-form oracle") {
    const double fs = 100.0;
    const FilterCoefficients bp = design_butterworth(FilterSpec::bandpass(3, 2.0, 10.0), fs);
    Signal x = testing::sinusoid(5.0, 1.0, fs, 8.0);
    x = testing::add_noise(std::move(x), 0.3, 99);

    const std::size_t pad = oracle::default_pad(bp, x.samples.size());
    const std::vector<double> expected = oracle::filtfilt_ba(bp, x.samples, pad);
    const std::vector<double> got = filtfilt(bp, x.samples);
    CHECK(testing::max_abs_diff(expected, got) < 1e-8);
}

TEST_CASE("filtfilt passes an in-band sinusoid with zero lag") {
    const double fs = 100.0;
    const FilterCoefficients bp = design_butterworth(FilterSpec::bandpass(6, 2.0, 10.0), fs);
    const Signal x = testing::sinusoid(5.0, 1.0, fs, 10.0);
    const Signal y = filtfilt(bp, x);

    // Amplitude within 2% (measured away from the edges).
    double amp = 0.0;
    for (std::size_t i = 100; i + 100 < y.samples.size(); ++i) {
        amp = std::max(amp, std::abs(y.samples[i]));
    }
    CHECK(amp == doctest::Approx(1.0).epsilon(0.02));

    // Cross-correlation peaks at lag zero (searched within half a period;
    // a pure tone only identifies lag modulo its period).
    double best = -1e300;
    int best_lag = -100;
    for (int lag = -9; lag <= 9; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 50; i + 50 < x.samples.size(); ++i) {
            acc += x.samples[i] * y.samples[i + lag];
        }
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    CHECK(best_lag == 0);
}

TEST_CASE("filtfilt is linear and length preserving") {
    const double fs = 128.0;
    const FilterCoefficients lp = design_butterworth(FilterSpec::lowpass(4, 12.0), fs);
    const Signal x = testing::add_noise(testing::sinusoid(3.0, 1.0, fs, 4.0), 0.5, 7);
    const Signal y = testing::add_noise(testing::sinusoid(9.0, 0.4, fs, 4.0), 0.2, 8);

    const double a = 1.7, b = -0.6;
    std::vector<double> combined(x.samples.size());
    for (std::size_t i = 0; i < combined.size(); ++i) {
        combined[i] = a * x.samples[i] + b * y.samples[i];
    }
    const std::vector<double> lhs = filtfilt(lp, combined);
    const std::vector<double> fx = filtfilt(lp, x.samples);
    const std::vector<double> fy = filtfilt(lp, y.samples);
    REQUIRE(lhs.size() == combined.size());

    double scale = testing::max_abs(lhs);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        CHECK(lhs[i] == doctest::Approx(a * fx[i] + b * fy[i]).epsilon(1e-9).scale(scale));
    }
}

TEST_CASE("filtfilt rejects signals shorter than the pad") {
    const FilterCoefficients lp = design_butterworth(FilterSpec::lowpass(2, 10.0), 100.0);
    const Signal x = testing::constant(1.0, 100.0, 0.05); // 5 samples
    CHECK_THROWS_AS(filtfilt(lp, x.samples, 5), std::invalid_argument);
    CHECK_NOTHROW(filtfilt(lp, x.samples, 4));
}

TEST_CASE("useful_component kills constants and keeps in-band content") {
    SUBCASE("constant") {
        const Signal x = testing::constant(5.0, 250.0, 10.0);
        const Signal y = useful_component(x);
        CHECK(testing::max_abs(y.samples) < 1e-4);
    }
    SUBCASE("1 Hz sinusoid keeps most of its amplitude") {
        // The 0.5 Hz highpass rings for a couple of seconds at each edge, so
        // measure the steady-state amplitude in the middle of a long signal.
        const Signal x = testing::sinusoid(1.0, 1.0, 250.0, 30.0);
        const Signal y = useful_component(x);
        double amp = 0.0;
        for (std::size_t i = 2500; i + 2500 < y.samples.size(); ++i) {
            amp = std::max(amp, std::abs(y.samples[i]));
        }
        CHECK(amp >= 0.95);
        CHECK(amp <= 1.0 + 1e-6);
    }
    SUBCASE("drift suppressed, 2 Hz sinusoid retained") {
        const double fs = 250.0;
        const std::size_t n = 2500;
        Signal drift;
        drift.fs_hz = fs;
        drift.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            drift.samples[i] = 10.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        const Signal tone = testing::sinusoid(2.0, 1.0, fs, 10.0);

        const Signal drift_out = useful_component(drift);
        CHECK(energy(drift_out.samples) <= 1e-2 * energy(drift.samples)); // >= 20 dB down

        const Signal tone_out = useful_component(tone);
        double amp = 0.0;
        for (std::size_t i = 250; i + 250 < tone_out.samples.size(); ++i) {
            amp = std::max(amp, std::abs(tone_out.samples[i]));
        }
        CHECK(amp == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("global SNR is the plain energy ratio") {
    Signal xf;
    xf.fs_hz = 100.0;
    xf.samples = {10.0};
    Signal delta;
    delta.fs_hz = 100.0;
    delta.samples = {1.0};
    CHECK(global_snr(xf, delta) == doctest::Approx(100.0));
    CHECK(global_snr(xf, xf) == doctest::Approx(1.0));
    CHECK_THROWS_AS(global_snr(xf, Signal{{0.0}, 100.0}), std::invalid_argument);
}

TEST_CASE("snr product identity") {
    SplitMix64 rng(4);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> xf(64), delta(64);
        for (auto& v : xf) v = rng.next_normal();
        for (auto& v : delta) v = rng.next_normal();
        const double snr = global_snr(xf, delta);
        CHECK(snr * energy(delta) == doctest::Approx(energy(xf)).epsilon(1e-12));
    }
}

TEST_CASE("dB and linear conversions invert each other") {
    CHECK(db_to_linear(25.0) == doctest::Approx(316.227766).epsilon(1e-6));
    for (double db = -60.0; db <= 60.0; db += 7.3) {
        CHECK(linear_to_db(db_to_linear(db)) == doctest::Approx(db).epsilon(1e-12));
    }
    for (double lin = 1e-4; lin < 1e4; lin *= 3.7) {
        CHECK(db_to_linear(linear_to_db(lin)) == doctest::Approx(lin).epsilon(1e-12));
    }
}

TEST_CASE("local deviation bound") {
    Signal xf;
    xf.fs_hz = 100.0;
    xf.samples = {3.16228, 0.0, -1.0};

    SUBCASE("10 dB beta") {
        const auto bound = local_deviation_bound(xf, 10.0, 0.0);
        CHECK(bound[0] == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(bound[1] == 0.0);
        CHECK(bound[2] == doctest::Approx(1.0 / std::sqrt(10.0)));
    }
    SUBCASE("-35 dB beta") {
        Signal unit;
        unit.fs_hz = 100.0;
        unit.samples = {1.0, -1.0};
        const auto bound = local_deviation_bound(unit, db_to_linear(-35.0), 0.0);
        CHECK(bound[0] == doctest::Approx(56.2341).epsilon(1e-3));
    }
    SUBCASE("floor keeps zero-crossing samples perturbable") {
        const auto bound = local_deviation_bound(xf, 10.0, 0.05);
        CHECK(bound[1] == 0.05);
    }
}

TEST_CASE("signal validation") {
    CHECK_THROWS_AS(validate_signal(Signal{{1.0, 2.0}, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_signal(Signal{{1.0}, 100.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_signal(Signal{{1.0, std::nan("")}, 100.0}), std::invalid_argument);
    CHECK_NOTHROW(validate_signal(Signal{{1.0, 2.0}, 100.0}));
}
