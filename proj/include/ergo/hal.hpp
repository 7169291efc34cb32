#pragma once

#include <array>
#include <span>
#include <vector>

#include "ergo/config.hpp"
#include "ergo/sync.hpp"
#include "ergo/types.hpp"

namespace ergo::hal {

struct HalParams {
    // D in the frequency model; the questionnaire-derived duty value is
    // used as a plain dimensionless multiplier.
    double duty_cycle = 75.0;
    double work_time_s = 10.0;
    double finger_threshold_n = 15.0;
    double overall_threshold_n = 44.8;
    int window_ticks = 600;  // work_time * 60 Hz
    // A triggered channel re-arms once its force drops below
    // rearm_fraction * threshold.
    double rearm_fraction = 0.9;
    enum class Grouping {
        AsPrinted,       // 6.56 ln(D F^1.31 / (1 + 3.18 F^1.31))
        DutyOutsideLog,  // 6.56 ln(D) F^1.31 / (1 + 3.18 F^1.31)
    } grouping = Grouping::AsPrinted;
    double clamp_lo = 0.0;
    double clamp_hi = 10.0;
    bool include_palm_in_total = false;

    void validate() const;
    static HalParams from_config(const Config& cfg);
};

// Per-finger force totals for one glove frame.
struct FingerForces {
    std::array<double, 5> f{};  // thumb..little
    double total = 0.0;         // sum of the five finger channels
};

FingerForces finger_sums(const GloveFrame& glove, const TaxelMap& map,
                         bool include_palm_in_total = false);

struct ExertionCount {
    int count = 0;
    double per_second = 0.0;  // count / work_time
};

// Rising-edge counter with hysteresis over one full window. A tick counts
// at most once even when several channels cross together.
ExertionCount count_exertions(std::span<const FingerForces> window, const HalParams& params);

// Eq-style frequency-to-HAL mapping; count 0 maps to 0 (the log singularity
// is clamped away).
double hal_from_count(const ExertionCount& count, const HalParams& params);
double hal_from_count(int count, const HalParams& params);

// Sliding 10 s window advanced one tick at a time; the first window_ticks
// outputs are zero-padded so the series matches the trial length.
ScoreSeries series(const sync::SyncedTrial& trial, const TaxelMap& map,
                   const HalParams& params);

// Per-window exertion counts for both hands (ticks < window_ticks are -1),
// used by the --recount-audit CLI flag and the oracle tests.
struct WindowCounts {
    std::vector<int> left;
    std::vector<int> right;
};
WindowCounts recount_audit(const sync::SyncedTrial& trial, const TaxelMap& map,
                           const HalParams& params);

// Force channel extraction shared with the ML window builder.
std::vector<FingerForces> force_series(const sync::SyncedTrial& trial, const TaxelMap& map,
                                       Side side, const HalParams& params);

}  // namespace ergo::hal
