#include <doctest.h>

#include <cmath>

#include "ergo/mldata.hpp"
#include "ergo/synth.hpp"
#include "helpers.hpp"

using namespace ergo;
using namespace ergo::mldata;

TEST_CASE("rula feature vectors carry all eleven channels") {
    rula::UpperBodyAngles a;
    a.right.upper_arm_flexion_deg = 35;
    a.right.shoulder_raised = true;
    a.right.lower_arm_flexion_deg = 80;
    a.right.wrist_flexion_deg = -12;
    a.right.wrist_deviation = true;
    a.right.wrist_twist_score = 2;
    a.neck_flexion_deg = 11;
    a.trunk_flexion_deg = 22;
    a.trunk_twisted = true;
    std::vector<double> x = rula_features(a, Side::Right);
    REQUIRE(x.size() == kRulaFeatureCount);
    CHECK(x[0] == 35.0);
    CHECK(x[1] == 1.0);
    CHECK(x[2] == 80.0);
    CHECK(x[4] == -12.0);
    CHECK(x[5] == 1.0);
    CHECK(x[6] == 2.0);
    CHECK(x[7] == 11.0);
    CHECK(x[9] == 22.0);
    CHECK(x[10] == 1.0);
    CHECK(rula_feature_names().size() == kRulaFeatureCount);
}

TEST_CASE("rula dataset pairs features with binned scorer labels") {
    sync::SyncedTrial trial =
        sync::synchronize(synth::generate_trial(testing::active_scenario(4.0), 19));
    RulaDataset ds = rula_dataset(trial, rula::Tables::builtin(), {1, 2, 1}, {}, 3);
    size_t expected_rows = 0;
    for (size_t i = 0; i < trial.size(); i += 3) expected_rows += 2;  // both sides
    CHECK(ds.features.rows == expected_rows);
    CHECK(ds.features.cols == kRulaFeatureCount);
    REQUIRE(ds.labels.size() == expected_rows);
    for (int label : ds.labels) {
        CHECK(label >= 0);
        CHECK(label <= 2);
    }
}

TEST_CASE("force channels resample to 25 Hz with linear interpolation") {
    synth::Scenario sc = testing::neutral_scenario(8.0);
    synth::ForcePrimitive hold;
    hold.type = synth::PrimitiveType::Hold;
    hold.finger = FingerId::Middle;
    hold.peak_n = 9.0;
    hold.start_s = 0.0;
    hold.end_s = 8.0;
    sc.primitives.push_back(hold);
    sync::SyncedTrial trial = sync::synchronize(synth::generate_trial(sc, 7));
    gru::Mat m = force_matrix_25hz(trial, TaxelMap::default_map(), Side::Left, {});
    CHECK(m.cols() == kWindowChannels);
    // constant channel survives both resampling stages exactly
    for (Eigen::Index t = 0; t < m.rows(); ++t) {
        CHECK(m(t, 2) == doctest::Approx(9.0).epsilon(1e-12));  // middle finger
        CHECK(m(t, 5) == doctest::Approx(9.0).epsilon(1e-12));  // total
        CHECK(m(t, 0) == 0.0);
    }
    // 25 Hz grid spans the same window as the 60 Hz trial
    double span60 = (static_cast<double>(trial.size()) - 1.0) / 60.0;
    double span25 = (static_cast<double>(m.rows()) - 1.0) / 25.0;
    CHECK(span25 <= span60 + 1e-9);
    CHECK(span60 - span25 < 1.0 / 25.0);
}

TEST_CASE("hal windows align their targets with the padded series") {
    synth::Scenario sc = testing::active_scenario(20.0);
    sync::SyncedTrial trial = sync::synchronize(synth::generate_trial(sc, 23));
    TaxelMap map = TaxelMap::default_map();
    hal::HalParams params;
    gru::Dataset ds = hal_window_dataset(trial, map, params, Side::Left, 25);
    REQUIRE(!ds.windows.empty());
    CHECK(ds.windows.size() == ds.targets.size());
    for (const gru::Mat& w : ds.windows) {
        CHECK(w.rows() == kWindowSteps);
        CHECK(w.cols() == kWindowChannels);
    }
    // every target must match the HAL series at the aligned 60 Hz tick
    ScoreSeries hal_series = hal::series(trial, map, params);
    gru::Mat channels = force_matrix_25hz(trial, map, Side::Left, params);
    size_t idx = 0;
    for (Eigen::Index e = kWindowSteps; e < channels.rows(); e += 25) {
        size_t tick = static_cast<size_t>(std::llround(e * 60.0 / 25.0));
        if (tick < static_cast<size_t>(params.window_ticks)) continue;
        if (tick >= hal_series.size()) break;
        REQUIRE(idx < ds.targets.size());
        CHECK(ds.targets[idx] == hal_series.left[tick]);
        // the window content is the trailing 10 s of the channel matrix
        CHECK(ds.windows[idx](kWindowSteps - 1, 5) == channels(e, 5));
        CHECK(ds.windows[idx](0, 5) == channels(e - kWindowSteps + 1, 5));
        ++idx;
    }
    CHECK(idx == ds.targets.size());
    // no target sits in the zero-padded head by construction
    for (double t : ds.targets) CHECK(t >= 0.0);
}
