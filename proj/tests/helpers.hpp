#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "ergo/synth.hpp"
#include "ergo/sync.hpp"

namespace ergo::testing {

// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("ergo_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// A still posture whose every RULA sub-score lands in its best band
// (forearm in the 60-100 working range, everything else neutral).
inline synth::Scenario neutral_scenario(double duration_s = 5.0) {
    synth::Scenario sc;
    sc.duration_s = duration_s;
    sc.trunk_lean_deg = 0;
    sc.trunk_sway_deg = 0;
    sc.neck_lean_deg = 0;
    sc.arm_raise_deg = 0;
    sc.arm_sway_deg = 0;
    sc.elbow_flex_deg = 80;
    sc.elbow_sway_deg = 0;
    sc.wrist_flex_bias_deg = 0;
    sc.wrist_flex_amp_deg = 0;
    sc.wrist_dev_amp_deg = 0;
    return sc;
}

// Moving posture with periodic pinching, used wherever a "realistic" trial
// is needed.
inline synth::Scenario active_scenario(double duration_s = 20.0) {
    synth::Scenario sc;
    sc.duration_s = duration_s;
    sc.trunk_lean_deg = 8;
    sc.trunk_sway_deg = 10;
    sc.arm_raise_deg = 30;
    sc.arm_sway_deg = 25;
    sc.elbow_flex_deg = 75;
    sc.elbow_sway_deg = 20;
    sc.wrist_flex_bias_deg = 5;
    sc.wrist_flex_amp_deg = 25;
    sc.wrist_dev_amp_deg = 10;
    synth::ForcePrimitive pinch;
    pinch.type = synth::PrimitiveType::Pinch;
    pinch.finger = FingerId::Index;
    pinch.peak_n = 20;
    pinch.freq_hz = 2.0;
    pinch.start_s = 0;
    pinch.end_s = duration_s;
    sc.primitives.push_back(pinch);
    return sc;
}

}  // namespace ergo::testing
