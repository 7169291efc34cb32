#pragma once

#include <string>
#include <vector>

#include "ergo/gbdt.hpp"
#include "ergo/gru.hpp"
#include "ergo/hal.hpp"
#include "ergo/rula.hpp"
#include "ergo/sync.hpp"

namespace ergo::mldata {

// --- RULA features for the boosted classifier --------------------------------

inline constexpr size_t kRulaFeatureCount = 11;
const std::vector<std::string>& rula_feature_names();
std::vector<double> rula_features(const rula::UpperBodyAngles& angles, Side side);

struct RulaDataset {
    gbdt::FeatureMatrix features;
    std::vector<int> labels;  // RiskLevel as int
};

// One sample per frame per side at the given stride; labels come from this
// artifact's own RULA scorer binned into risk levels.
RulaDataset rula_dataset(const sync::SyncedTrial& trial, const rula::Tables& tables,
                         const rula::RulaAdjustments& adj, const rula::AngleConfig& cfg,
                         int frame_stride);
void append(RulaDataset& into, const RulaDataset& from);

// --- HAL force windows for the GRU -------------------------------------------

// The ML windows run at 25 Hz so a 10 s window is 250 steps of the five
// finger forces plus their sum.
inline constexpr double kMlRate = 25.0;
inline constexpr int kWindowSteps = 250;
inline constexpr int kWindowChannels = 6;
inline constexpr int kDefaultWindowStride = 25;  // 1 s between window ends

// Finger-force channels linearly resampled from the 60 Hz trial onto the
// 25 Hz grid; rows are time steps, columns thumb..little plus total.
gru::Mat force_matrix_25hz(const sync::SyncedTrial& trial, const TaxelMap& map, Side side,
                           const hal::HalParams& params);

// Windows ending at 25 Hz index e (target = HAL series value at the aligned
// 60 Hz tick); only windows whose target lies past the zero-padded head are
// emitted.
gru::Dataset hal_window_dataset(const sync::SyncedTrial& trial, const TaxelMap& map,
                                const hal::HalParams& params, Side side, int stride);
void append(gru::Dataset& into, const gru::Dataset& from);

}  // namespace ergo::mldata
