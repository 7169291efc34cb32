#include "ergo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ergo/error.hpp"
#include "ergo/mldata.hpp"

using nlohmann::json;

namespace ergo::eval {

const char* risk_name(RiskLevel level) {
    switch (level) {
        case RiskLevel::Low: return "low";
        case RiskLevel::Medium: return "medium";
        case RiskLevel::High: return "high";
    }
    return "?";
}

RiskLevel bin_rula(int score) {
    if (score < 1 || score > 7)
        throw PreconditionError("evaluation",
                                "RULA score out of range: " + std::to_string(score));
    if (score <= 3) return RiskLevel::Low;
    if (score <= 5) return RiskLevel::Medium;
    return RiskLevel::High;
}

RiskLevel bin_hal(double score) {
    if (!(score >= 0.0 && score <= 10.0))
        throw PreconditionError("evaluation", "HAL score out of range");
    if (score < 4.0) return RiskLevel::Low;
    if (score < 8.0) return RiskLevel::Medium;
    return RiskLevel::High;
}

ConservativeReport classification_report(std::span<const RiskLevel> predicted,
                                         std::span<const RiskLevel> truth) {
    if (predicted.size() != truth.size())
        throw PreconditionError("evaluation", "prediction/truth length mismatch");
    if (predicted.empty())
        throw PreconditionError("evaluation", "empty classification input");
    size_t conservative = 0, one_low = 0, two_off = 0;
    for (size_t i = 0; i < predicted.size(); ++i) {
        int diff = static_cast<int>(predicted[i]) - static_cast<int>(truth[i]);
        if (diff == 0 || diff == 1) ++conservative;
        else if (diff == -1) ++one_low;
        else ++two_off;  // |diff| == 2, either direction
    }
    double n = static_cast<double>(predicted.size());
    ConservativeReport r;
    r.pct_correct_or_conservative = 100.0 * static_cast<double>(conservative) / n;
    r.pct_off_by_one = 100.0 * static_cast<double>(one_low) / n;
    r.pct_off_by_two = 100.0 * static_cast<double>(two_off) / n;
    r.count = predicted.size();
    return r;
}

void verify_fold_disjoint(const std::vector<std::string>& train_ids,
                          const std::string& held_out) {
    for (const std::string& id : train_ids)
        if (id == held_out)
            throw PreconditionError("evaluation",
                                    "held-out participant '" + held_out +
                                        "' present in the training set");
}

namespace {

std::vector<std::string> participant_ids(std::span<const EvalTrial> trials) {
    std::set<std::string> ids;
    for (const EvalTrial& t : trials) ids.insert(t.participant);
    return {ids.begin(), ids.end()};
}

void require_multiple_participants(const std::vector<std::string>& ids) {
    if (ids.size() < 2)
        throw PreconditionError("evaluation",
                                "leave-one-out needs at least 2 participants, got " +
                                    std::to_string(ids.size()));
}

}  // namespace

std::vector<HoldoutRun> leave_one_out_rula(std::span<const EvalTrial> trials,
                                           const rula::Tables& tables,
                                           const RulaEvalConfig& cfg) {
    std::vector<std::string> ids = participant_ids(trials);
    require_multiple_participants(ids);

    std::vector<HoldoutRun> runs;
    for (const std::string& held : ids) {
        mldata::RulaDataset train_set;
        std::vector<std::string> train_ids;
        for (const EvalTrial& t : trials) {
            if (t.participant == held) continue;
            train_ids.push_back(t.participant);
            append(train_set, mldata::rula_dataset(t.trial, tables, cfg.adjustments,
                                                   cfg.angles, cfg.train_stride));
        }
        verify_fold_disjoint(train_ids, held);
        gbdt::TrainResult trained = gbdt::train(
            train_set.features, train_set.labels, cfg.train);

        // pool the held-out participant's frames per (tool, side)
        std::map<std::pair<std::string, Side>,
                 std::pair<std::vector<RiskLevel>, std::vector<RiskLevel>>>
            groups;
        for (const EvalTrial& t : trials) {
            if (t.participant != held) continue;
            mldata::RulaDataset test_set = mldata::rula_dataset(
                t.trial, tables, cfg.adjustments, cfg.angles, cfg.eval_stride);
            // rows alternate left/right per frame
            for (size_t row = 0; row < test_set.features.rows; ++row) {
                Side side = row % 2 == 0 ? Side::Left : Side::Right;
                auto& [pred, truth] = groups[{t.tool, side}];
                pred.push_back(static_cast<RiskLevel>(
                    trained.model.predict_class(test_set.features.row(row))));
                truth.push_back(static_cast<RiskLevel>(test_set.labels[row]));
            }
        }
        for (const auto& [key, pt] : groups) {
            HoldoutRun run;
            run.held_out = held;
            run.tool = key.first;
            run.side = key.second;
            run.model_kind = "rula_gbdt";
            run.report = classification_report(pt.first, pt.second);
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

std::vector<HoldoutRun> leave_one_out_gru(std::span<const EvalTrial> trials,
                                          const HalEvalConfig& cfg) {
    std::vector<std::string> ids = participant_ids(trials);
    require_multiple_participants(ids);

    std::vector<HoldoutRun> runs;
    for (const std::string& held : ids) {
        gru::Dataset train_set;
        std::vector<std::string> train_ids;
        for (const EvalTrial& t : trials) {
            if (t.participant == held) continue;
            train_ids.push_back(t.participant);
            for (Side side : {Side::Left, Side::Right})
                mldata::append(train_set, mldata::hal_window_dataset(t.trial, cfg.map, cfg.params,
                                                             side, cfg.train_stride));
        }
        verify_fold_disjoint(train_ids, held);
        gru::TrainResult trained = gru::train(train_set, cfg.train);

        std::map<std::pair<std::string, Side>,
                 std::pair<std::vector<RiskLevel>, std::vector<RiskLevel>>>
            groups;
        for (const EvalTrial& t : trials) {
            if (t.participant != held) continue;
            for (Side side : {Side::Left, Side::Right}) {
                gru::Dataset test_set = mldata::hal_window_dataset(t.trial, cfg.map,
                                                                   cfg.params, side,
                                                                   cfg.eval_stride);
                auto& [pred, truth] = groups[{t.tool, side}];
                for (size_t i = 0; i < test_set.windows.size(); ++i) {
                    pred.push_back(bin_hal(gru::predict_hal(trained.params, test_set.windows[i])));
                    truth.push_back(bin_hal(test_set.targets[i]));
                }
            }
        }
        for (const auto& [key, pt] : groups) {
            if (pt.first.empty()) continue;
            HoldoutRun run;
            run.held_out = held;
            run.tool = key.first;
            run.side = key.second;
            run.model_kind = "hal_gru";
            run.report = classification_report(pt.first, pt.second);
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

std::string report_csv(std::span<const HoldoutRun> runs, const Producer& producer) {
    std::string out = producer.csv_header();
    out += "model,tool,side,participant,pct_correct_or_conservative,pct_off_by_one,"
           "pct_off_by_two,samples\n";
    for (const HoldoutRun& r : runs) {
        out += r.model_kind;
        out += ',' + r.tool;
        out += ',';
        out += side_name(r.side);
        out += ',' + r.held_out;
        out += ',' + format_double(r.report.pct_correct_or_conservative);
        out += ',' + format_double(r.report.pct_off_by_one);
        out += ',' + format_double(r.report.pct_off_by_two);
        out += ',' + std::to_string(r.report.count);
        out += '\n';
    }
    return out;
}

std::string report_text(std::span<const HoldoutRun> runs) {
    // group in Tables 2-3 style: one block per (model, tool, side)
    std::map<std::tuple<std::string, std::string, Side>, std::vector<const HoldoutRun*>>
        blocks;
    for (const HoldoutRun& r : runs) blocks[{r.model_kind, r.tool, r.side}].push_back(&r);

    std::string out;
    char buf[160];
    for (const auto& [key, list] : blocks) {
        const auto& [model, tool, side] = key;
        std::string side_title = side == Side::Left ? "Left" : "Right";
        out += "== " + model + " | " + side_title + " Side, " + tool + " ==\n";
        std::snprintf(buf, sizeof(buf), "%-12s %26s %18s %18s\n", "participant",
                      "correct_or_conservative_%", "off_by_one_%", "off_by_two_%");
        out += buf;
        for (const HoldoutRun* r : list) {
            std::snprintf(buf, sizeof(buf), "%-12s %26.2f %18.2f %18.2f\n",
                          r->held_out.c_str(), r->report.pct_correct_or_conservative,
                          r->report.pct_off_by_one, r->report.pct_off_by_two);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

json report_json(std::span<const HoldoutRun> runs, const Producer& producer) {
    json arr = json::array();
    for (const HoldoutRun& r : runs) {
        arr.push_back({{"model", r.model_kind},
                       {"tool", r.tool},
                       {"side", side_name(r.side)},
                       {"participant", r.held_out},
                       {"pct_correct_or_conservative", r.report.pct_correct_or_conservative},
                       {"pct_off_by_one", r.report.pct_off_by_one},
                       {"pct_off_by_two", r.report.pct_off_by_two},
                       {"samples", r.report.count}});
    }
    json doc;
    doc["schema"] = "ergo.holdout_report.v1";
    doc["producer"] = {{"subcommand", producer.subcommand},
                       {"config_hash", producer.config_hash},
                       {"seed", producer.seed}};
    doc["runs"] = std::move(arr);
    return doc;
}

}  // namespace ergo::eval
