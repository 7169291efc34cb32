#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergo/config.hpp"
#include "ergo/types.hpp"

namespace ergo::synth {

enum class PrimitiveType { Hold, Pinch, Smooth, Press, Palm };

// One scripted force pattern. Hold applies a constant force, Pinch/Press
// produce half-sine pulses at freq_hz (freq 0 degenerates to Hold), Smooth
// is a raised sinusoid that never drops to zero, Palm loads the palm taxels.
struct ForcePrimitive {
    PrimitiveType type = PrimitiveType::Hold;
    FingerId finger = FingerId::Index;
    bool all_fingers = false;
    double peak_n = 10.0;
    double freq_hz = 0.0;
    double start_s = 0.0;
    double end_s = 1e9;
    std::optional<Side> side;  // unset = both hands

    // "type:finger:peak:freq:start:end[:side]", finger may be "all"
    static ForcePrimitive parse(const std::string& text);
};

struct Scenario {
    std::string participant_id = "P1";
    std::string tool = "stringer";
    double duration_s = 30.0;

    double body_rate = 60.0;
    double hand_rate = 90.0;
    double gonio_rate = 50.0;
    double glove_rate = 25.0;

    // posture program, degrees / Hz
    double trunk_lean_deg = 5.0, trunk_sway_deg = 5.0, trunk_sway_hz = 0.05;
    double neck_lean_deg = 5.0;
    double arm_raise_deg = 30.0, arm_sway_deg = 20.0, arm_sway_hz = 0.08;
    double elbow_flex_deg = 80.0, elbow_sway_deg = 10.0, elbow_sway_hz = 0.07;
    double wrist_flex_bias_deg = 5.0, wrist_flex_amp_deg = 20.0, wrist_flex_hz = 0.4;
    double wrist_dev_amp_deg = 5.0, wrist_dev_hz = 0.3;

    double pose_noise_m = 0.0;    // jitter on joint positions
    double force_noise_n = 0.0;   // uniform [0, x) additive taxel noise
    double amp_jitter_pct = 0.0;  // per-seed variation of amplitudes

    std::vector<ForcePrimitive> primitives;

    static Scenario from_config(const Config& cfg);
    void validate() const;
};

// Deterministic function of (scenario, seed). Streams honor their native
// rates; glove forces are placed so that scoring via the default TaxelMap
// sees them at the generated hand landmark positions.
TrialBundle generate_trial(const Scenario& scenario, uint64_t seed);

}  // namespace ergo::synth
