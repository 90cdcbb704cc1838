#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"

#include "psqi/errors.hpp"
#include "psqi/features.hpp"
#include "psqi/noise.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace psqi;

TEST_CASE("gaussian noise has kurtosis 3 and skewness 0") {
    Signal x;
    x.fs_hz = 100.0;
    x.samples.resize(100000);
    SplitMix64 rng(31);
    for (double& v : x.samples) v = rng.next_normal();

    const FeatureVector f = extract_features(x);
    CHECK(f.kurtosis == doctest::Approx(3.0).epsilon(0.1 / 3.0));
    CHECK(std::abs(f.skewness) < 0.05);
}

TEST_CASE("a pure tone is spectrally pure and in-band") {
    const Signal x = testing::sinusoid(10.0, 1.0, 250.0, 10.0);
    const FeatureVector f = extract_features(x);
    CHECK(f.power_ratio_5_20 >= 0.99);
    CHECK(f.spectral_purity >= 0.99);
    CHECK(f.spectral_purity <= 1.0 + 1e-12);
}

TEST_CASE("clean pulse train yields exact rhythm features") {
    const Signal x = testing::unit_pulse_train(250.0, 10.0);
    const FeatureVector f = extract_features(x);
    REQUIRE(f.median_hr_bpm.has_value());
    CHECK(*f.median_hr_bpm == doctest::Approx(60.0).epsilon(1.0 / 60.0));
    REQUIRE(f.min_rr_s.has_value());
    REQUIRE(f.max_rr_s.has_value());
    CHECK(*f.min_rr_s == doctest::Approx(1.0).epsilon(0.01));
    CHECK(*f.max_rr_s == doctest::Approx(1.0).epsilon(0.01));
    REQUIRE(f.detector_agreement.has_value());
    CHECK(*f.detector_agreement == 1.0);
    REQUIRE(f.template_corr.has_value());
    CHECK(*f.template_corr > 0.99);
}

TEST_CASE("statistical features are scale and shift invariant") {
    Signal x = testing::add_noise(testing::unit_pulse_train(250.0, 10.0), 0.05, 3);
    const FeatureVector base = extract_features(x);

    Signal scaled = x;
    for (double& v : scaled.samples) v *= 7.5;
    const FeatureVector s = extract_features(scaled);
    CHECK(s.kurtosis == doctest::Approx(base.kurtosis).epsilon(1e-9));
    CHECK(s.skewness == doctest::Approx(base.skewness).epsilon(1e-9));
    CHECK(s.power_ratio_5_20 == doctest::Approx(base.power_ratio_5_20).epsilon(1e-9));
    CHECK(s.spectral_purity == doctest::Approx(base.spectral_purity).epsilon(1e-9));
    CHECK(*s.template_corr == doctest::Approx(*base.template_corr).epsilon(1e-9));
    CHECK(*s.detector_agreement == *base.detector_agreement);
    CHECK(*s.median_hr_bpm == *base.median_hr_bpm);

    Signal shifted = x;
    for (double& v : shifted.samples) v += 42.0;
    const FeatureVector t = extract_features(shifted);
    CHECK(t.kurtosis == doctest::Approx(base.kurtosis).epsilon(1e-9));
    CHECK(t.skewness == doctest::Approx(base.skewness).epsilon(1e-6));
}

TEST_CASE("too few beats leaves beat features missing") {
    // One lone bump: statistical features present, beat features absent.
    const Signal x = testing::pulse_train({5.0}, {1.0}, 0.010, 250.0, 10.0);
    const FeatureVector f = extract_features(x);
    CHECK_FALSE(f.median_hr_bpm.has_value());
    CHECK_FALSE(f.min_rr_s.has_value());
    CHECK_FALSE(f.max_rr_s.has_value());
    CHECK_FALSE(f.template_corr.has_value());
    CHECK_FALSE(f.detector_agreement.has_value());
    CHECK(std::isfinite(f.kurtosis));
}

TEST_CASE("short signals are rejected") {
    CHECK_THROWS_AS(extract_features(testing::sinusoid(5.0, 1.0, 250.0, 3.0)),
                    std::invalid_argument);
}

TEST_CASE("feature table round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "psqi_feature_test";
    fs::create_directories(dir);
    const std::string path = (dir / "features.csv").string();

    SUBCASE("empty table is header only") {
        write_feature_table(path, {});
        std::ifstream in(path);
        std::string line;
        REQUIRE(std::getline(in, line));
        CHECK(line == kFeatureTableHeader);
        CHECK_FALSE(std::getline(in, line));
    }

    SUBCASE("one row has 11 columns and survives re-parsing") {
        const Signal x = testing::add_noise(testing::unit_pulse_train(250.0, 10.0), 0.02, 5);
        FeatureRow row;
        row.id = "w0";
        row.features = extract_features(x);
        row.metric = 0.123456789012345;
        write_feature_table(path, {row});

        std::ifstream in(path);
        std::string header, data;
        REQUIRE(std::getline(in, header));
        REQUIRE(std::getline(in, data));
        CHECK(std::count(data.begin(), data.end(), ',') == 10);

        const std::vector<FeatureRow> parsed = read_feature_table(path);
        REQUIRE(parsed.size() == 1);
        CHECK(parsed[0].id == "w0");
        CHECK(parsed[0].features.kurtosis ==
              doctest::Approx(row.features.kurtosis).epsilon(1e-9));
        CHECK(parsed[0].features.spectral_purity ==
              doctest::Approx(row.features.spectral_purity).epsilon(1e-9));
        REQUIRE(parsed[0].metric.has_value());
        CHECK(*parsed[0].metric == doctest::Approx(*row.metric).epsilon(1e-9));
        REQUIRE(parsed[0].features.template_corr.has_value());
        CHECK(*parsed[0].features.template_corr ==
              doctest::Approx(*row.features.template_corr).epsilon(1e-9));
    }

    SUBCASE("missing fields stay missing through the round trip") {
        FeatureRow row;
        row.id = "sparse";
        row.features.kurtosis = 2.5;
        write_feature_table(path, {row});
        const std::vector<FeatureRow> parsed = read_feature_table(path);
        REQUIRE(parsed.size() == 1);
        CHECK_FALSE(parsed[0].features.median_hr_bpm.has_value());
        CHECK_FALSE(parsed[0].metric.has_value());
    }
    fs::remove_all(dir);
}
