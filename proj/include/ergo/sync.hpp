#pragma once

#include <string>
#include <vector>

#include "ergo/io_util.hpp"
#include "ergo/types.hpp"

namespace ergo::sync {

// The camera-aligned output rate everything is resampled to.
inline constexpr double kRate = 60.0;
// Ticks within this of window.end are still emitted.
inline constexpr double kBoundaryEps = 1e-9;

struct TimeWindow {
    Timestamp start = 0.0;
    Timestamp end = 0.0;
};

struct SyncOptions {
    double saturation_ceiling_n = kDefaultSaturationCeilingN;
};

// Largest window covered by every stream in the bundle.
TimeWindow common_window(const TrialBundle& bundle);

// Number of 60 Hz ticks in the window: floor(span * 60) + 1, with the
// boundary tolerance above.
size_t tick_count(TimeWindow window);

// Linear interpolation onto start + k/60. Numeric channels are interpolated
// component-wise; palm normals are re-normalized afterwards. Gaps wider than
// twice the stream's median period but at most 0.5 s hold the last value;
// wider gaps are an error.
SensorStream resample(const SensorStream& stream, TimeWindow window,
                      const SyncOptions& opts = {});

struct SyncedTrial {
    std::string participant_id;
    std::string tool;
    double rate = kRate;
    std::vector<Timestamp> t;
    std::vector<BodyPoseFrame> body;
    std::vector<HandPoseFrame> hand_left, hand_right;
    std::vector<GonioSample> gonio_left, gonio_right;
    std::vector<GloveFrame> glove_left, glove_right;

    size_t size() const { return t.size(); }
    const std::vector<HandPoseFrame>& hand(Side s) const {
        return s == Side::Left ? hand_left : hand_right;
    }
    const std::vector<GonioSample>& gonio(Side s) const {
        return s == Side::Left ? gonio_left : gonio_right;
    }
    const std::vector<GloveFrame>& glove(Side s) const {
        return s == Side::Left ? glove_left : glove_right;
    }
};

// Trims to the common window and aligns all seven streams on one tick
// sequence. Requires a complete bundle with no fatal validation issues.
SyncedTrial synchronize(const TrialBundle& bundle, const SyncOptions& opts = {});

// Re-wraps a synced trial as a bundle of 60 Hz streams.
TrialBundle to_bundle(const SyncedTrial& trial);

// One CSV row per tick plus a JSON header describing the column layout.
// Values render shortest-round-trip, so reloading is bit-exact.
void write_csv(const SyncedTrial& trial, const std::string& csv_path,
               const std::string& header_path, const Producer& producer,
               const SyncOptions& opts = {});
SyncedTrial read_csv(const std::string& csv_path, const std::string& header_path);

}  // namespace ergo::sync
