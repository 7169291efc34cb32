#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergo/gbdt.hpp"
#include "ergo/gru.hpp"
#include "ergo/hal.hpp"
#include "ergo/io_util.hpp"
#include "ergo/rula.hpp"
#include "ergo/sync.hpp"

namespace ergo::eval {

enum class RiskLevel { Low = 0, Medium = 1, High = 2 };
const char* risk_name(RiskLevel level);

// RULA 1-3 low, 4-5 medium, 6-7 high.
RiskLevel bin_rula(int score);
// HAL [0,4) low, [4,8) medium, [8,10] high (boundaries lower-inclusive).
RiskLevel bin_hal(double score);

struct ConservativeReport {
    double pct_correct_or_conservative = 0.0;  // exact or one level above truth
    double pct_off_by_one = 0.0;               // one level below truth
    double pct_off_by_two = 0.0;               // two levels off, either direction
    size_t count = 0;
};

ConservativeReport classification_report(std::span<const RiskLevel> predicted,
                                         std::span<const RiskLevel> truth);

struct EvalTrial {
    std::string participant;
    std::string tool;
    sync::SyncedTrial trial;
};

struct HoldoutRun {
    std::string held_out;
    std::string tool;
    Side side = Side::Left;
    std::string model_kind;  // "rula_gbdt" | "hal_gru"
    ConservativeReport report;
};

// Throws when the held-out participant leaked into the training ids.
void verify_fold_disjoint(const std::vector<std::string>& train_ids,
                          const std::string& held_out);

struct RulaEvalConfig {
    rula::RulaAdjustments adjustments{};
    rula::AngleConfig angles{};
    gbdt::TrainConfig train{};
    int train_stride = 2;
    int eval_stride = 1;
};

struct HalEvalConfig {
    hal::HalParams params{};
    TaxelMap map = TaxelMap::default_map();
    gru::TrainConfig train{};
    int train_stride = 25;
    int eval_stride = 5;
};

// Leave-one-participant-out: train on everyone else, score the held-out
// participant, report per (tool, side). Labels on both sides of the fold
// come from this artifact's own scorers.
std::vector<HoldoutRun> leave_one_out_rula(std::span<const EvalTrial> trials,
                                           const rula::Tables& tables,
                                           const RulaEvalConfig& cfg);
std::vector<HoldoutRun> leave_one_out_gru(std::span<const EvalTrial> trials,
                                          const HalEvalConfig& cfg);

std::string report_csv(std::span<const HoldoutRun> runs, const Producer& producer);
std::string report_text(std::span<const HoldoutRun> runs);
nlohmann::json report_json(std::span<const HoldoutRun> runs, const Producer& producer);

}  // namespace ergo::eval
