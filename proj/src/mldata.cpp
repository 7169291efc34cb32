#include "ergo/mldata.hpp"

#include <cmath>

#include "ergo/error.hpp"
#include "ergo/eval.hpp"

namespace ergo::mldata {

const std::vector<std::string>& rula_feature_names() {
    static const std::vector<std::string> names = {
        "upper_arm_flexion_deg", "shoulder_raised",   "lower_arm_flexion_deg",
        "lower_arm_cross_midline", "wrist_flexion_deg", "wrist_deviation",
        "wrist_twist_score",     "neck_flexion_deg",  "neck_twisted",
        "trunk_flexion_deg",     "trunk_twisted",
    };
    return names;
}

std::vector<double> rula_features(const rula::UpperBodyAngles& angles, Side side) {
    const rula::SideAngles& sa = angles.side(side);
    return {
        sa.upper_arm_flexion_deg,
        sa.shoulder_raised ? 1.0 : 0.0,
        sa.lower_arm_flexion_deg,
        sa.lower_arm_cross_midline ? 1.0 : 0.0,
        sa.wrist_flexion_deg,
        sa.wrist_deviation ? 1.0 : 0.0,
        static_cast<double>(sa.wrist_twist_score),
        angles.neck_flexion_deg,
        angles.neck_twisted ? 1.0 : 0.0,
        angles.trunk_flexion_deg,
        angles.trunk_twisted ? 1.0 : 0.0,
    };
}

RulaDataset rula_dataset(const sync::SyncedTrial& trial, const rula::Tables& tables,
                         const rula::RulaAdjustments& adj, const rula::AngleConfig& cfg,
                         int frame_stride) {
    if (frame_stride < 1)
        throw PreconditionError("ml_models", "frame stride must be >= 1");
    RulaDataset out;
    out.features.cols = kRulaFeatureCount;
    for (size_t i = 0; i < trial.size(); i += static_cast<size_t>(frame_stride)) {
        rula::UpperBodyAngles angles =
            rula::joint_angles(trial.body[i], trial.gonio_left[i], trial.gonio_right[i], cfg);
        for (Side side : {Side::Left, Side::Right}) {
            std::vector<double> x = rula_features(angles, side);
            out.features.push_row(x);
            int score = rula::frame_score(tables, angles, adj, side).final_score;
            out.labels.push_back(static_cast<int>(eval::bin_rula(score)));
        }
    }
    return out;
}

void append(RulaDataset& into, const RulaDataset& from) {
    if (into.features.cols == 0) into.features.cols = from.features.cols;
    if (into.features.cols != from.features.cols)
        throw PreconditionError("ml_models", "cannot append datasets of different widths");
    into.features.data.insert(into.features.data.end(), from.features.data.begin(),
                              from.features.data.end());
    into.features.rows += from.features.rows;
    into.labels.insert(into.labels.end(), from.labels.begin(), from.labels.end());
}

gru::Mat force_matrix_25hz(const sync::SyncedTrial& trial, const TaxelMap& map, Side side,
                           const hal::HalParams& params) {
    std::vector<hal::FingerForces> forces = hal::force_series(trial, map, side, params);
    size_t n60 = forces.size();
    if (n60 < 2) throw PreconditionError("ml_models", "trial too short for ML windows");
    // last 25 Hz step that still lies inside the 60 Hz span
    size_t n25 = static_cast<size_t>(
                     std::floor(static_cast<double>(n60 - 1) * kMlRate / sync::kRate + 1e-9)) +
                 1;
    gru::Mat out(static_cast<Eigen::Index>(n25), kWindowChannels);
    for (size_t k = 0; k < n25; ++k) {
        double pos = static_cast<double>(k) * sync::kRate / kMlRate;  // 60 Hz index space
        size_t j = std::min(static_cast<size_t>(pos), n60 - 2);
        double a = pos - static_cast<double>(j);
        const hal::FingerForces& lo = forces[j];
        const hal::FingerForces& hi = forces[j + 1];
        for (int c = 0; c < 5; ++c)
            out(static_cast<Eigen::Index>(k), c) = lo.f[c] + (hi.f[c] - lo.f[c]) * a;
        out(static_cast<Eigen::Index>(k), 5) = lo.total + (hi.total - lo.total) * a;
    }
    return out;
}

gru::Dataset hal_window_dataset(const sync::SyncedTrial& trial, const TaxelMap& map,
                                const hal::HalParams& params, Side side, int stride) {
    if (stride < 1) throw PreconditionError("ml_models", "window stride must be >= 1");
    gru::Mat channels = force_matrix_25hz(trial, map, side, params);
    ScoreSeries hal_series = hal::series(trial, map, params);
    const std::vector<double>& targets = side == Side::Left ? hal_series.left : hal_series.right;

    gru::Dataset out;
    Eigen::Index n25 = channels.rows();
    for (Eigen::Index e = kWindowSteps; e < n25; e += stride) {
        // 60 Hz tick aligned with the window end
        size_t tick = static_cast<size_t>(
            std::llround(static_cast<double>(e) * sync::kRate / kMlRate));
        if (tick < static_cast<size_t>(params.window_ticks)) continue;
        if (tick >= targets.size()) break;
        out.windows.push_back(channels.middleRows(e - kWindowSteps + 1, kWindowSteps));
        out.targets.push_back(targets[tick]);
    }
    return out;
}

void append(gru::Dataset& into, const gru::Dataset& from) {
    into.windows.insert(into.windows.end(), from.windows.begin(), from.windows.end());
    into.targets.insert(into.targets.end(), from.targets.begin(), from.targets.end());
}

}  // namespace ergo::mldata
