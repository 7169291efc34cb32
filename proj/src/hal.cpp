#include "ergo/hal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergo/error.hpp"

namespace ergo::hal {

void HalParams::validate() const {
    if (!(finger_threshold_n > 0.0) || !(overall_threshold_n > 0.0))
        throw PreconditionError("hal_scorer", "force thresholds must be positive");
    if (!(work_time_s > 0.0))
        throw PreconditionError("hal_scorer", "work time must be positive");
    if (window_ticks != static_cast<int>(work_time_s * sync::kRate + 0.5))
        throw PreconditionError("hal_scorer",
                                "window_ticks must equal work_time x 60 Hz");
    if (!(rearm_fraction > 0.0 && rearm_fraction < 1.0))
        throw PreconditionError("hal_scorer", "rearm fraction must lie in (0, 1)");
    if (!(duty_cycle > 0.0))
        throw PreconditionError("hal_scorer", "duty cycle must be positive");
    if (!(clamp_lo < clamp_hi))
        throw PreconditionError("hal_scorer", "invalid clamp range");
}

HalParams HalParams::from_config(const Config& cfg) {
    HalParams p;
    p.duty_cycle = cfg.get_double("hal.duty_cycle", p.duty_cycle);
    p.work_time_s = cfg.get_double("hal.work_time_s", p.work_time_s);
    p.finger_threshold_n = cfg.get_double("hal.finger_threshold_n", p.finger_threshold_n);
    p.overall_threshold_n = cfg.get_double("hal.overall_threshold_n", p.overall_threshold_n);
    p.window_ticks = cfg.get_int("hal.window_ticks",
                                 static_cast<int>(p.work_time_s * sync::kRate + 0.5));
    p.rearm_fraction = cfg.get_double("hal.rearm_fraction", p.rearm_fraction);
    std::string grouping = cfg.get_string("hal.formula_grouping", "as_printed");
    if (grouping == "as_printed") p.grouping = Grouping::AsPrinted;
    else if (grouping == "duty_outside_log") p.grouping = Grouping::DutyOutsideLog;
    else throw ParseError("hal_scorer", "hal.formula_grouping must be as_printed or duty_outside_log");
    p.clamp_lo = cfg.get_double("hal.clamp_lo", p.clamp_lo);
    p.clamp_hi = cfg.get_double("hal.clamp_hi", p.clamp_hi);
    p.include_palm_in_total = cfg.get_bool("hal.include_palm_in_total", p.include_palm_in_total);
    p.validate();
    return p;
}

FingerForces finger_sums(const GloveFrame& glove, const TaxelMap& map,
                         bool include_palm_in_total) {
    FingerForces out;
    double palm = 0.0;
    for (int i = 0; i < kTaxels; ++i) {
        const TaxelSite& site = map.sites[i];
        if (site.finger == FingerId::Palm) {
            palm += glove.taxels[i];
        } else {
            out.f[static_cast<int>(site.finger)] += glove.taxels[i];
        }
    }
    out.total = out.f[0] + out.f[1] + out.f[2] + out.f[3] + out.f[4];
    if (include_palm_in_total) out.total += palm;
    return out;
}

namespace {

// Six hysteresis channels: five fingers plus the whole-hand total.
class ExertionCounter {
public:
    explicit ExertionCounter(const HalParams& p) : p_(p) { armed_.fill(true); }

    void step(const FingerForces& ff) {
        bool fired = false;
        for (int ch = 0; ch < 6; ++ch) {
            double v = ch < 5 ? ff.f[ch] : ff.total;
            double thr = ch < 5 ? p_.finger_threshold_n : p_.overall_threshold_n;
            if (armed_[ch]) {
                if (v > thr) {
                    armed_[ch] = false;
                    fired = true;
                }
            } else if (v < p_.rearm_fraction * thr) {
                armed_[ch] = true;
            }
        }
        if (fired) ++count_;
    }

    int count() const { return count_; }

private:
    const HalParams& p_;
    std::array<bool, 6> armed_{};
    int count_ = 0;
};

}  // namespace

ExertionCount count_exertions(std::span<const FingerForces> window, const HalParams& params) {
    params.validate();
    if (static_cast<int>(window.size()) != params.window_ticks)
        throw PreconditionError("hal_scorer",
                                "window length " + std::to_string(window.size()) +
                                    " != window_ticks " + std::to_string(params.window_ticks));
    ExertionCounter counter(params);
    for (const FingerForces& ff : window) counter.step(ff);
    return {counter.count(), counter.count() / params.work_time_s};
}

double hal_from_count(const ExertionCount& count, const HalParams& params) {
    if (count.count <= 0) return params.clamp_lo == 0.0 ? 0.0 : params.clamp_lo;
    double f_pow = std::pow(count.per_second, 1.31);
    double raw;
    switch (params.grouping) {
        case HalParams::Grouping::AsPrinted:
            raw = 6.56 * std::log(params.duty_cycle * f_pow / (1.0 + 3.18 * f_pow));
            break;
        case HalParams::Grouping::DutyOutsideLog:
            raw = 6.56 * std::log(params.duty_cycle) * f_pow / (1.0 + 3.18 * f_pow);
            break;
        default:
            raw = 0.0;
    }
    return std::clamp(raw, params.clamp_lo, params.clamp_hi);
}

double hal_from_count(int count, const HalParams& params) {
    return hal_from_count(ExertionCount{count, count / params.work_time_s}, params);
}

std::vector<FingerForces> force_series(const sync::SyncedTrial& trial, const TaxelMap& map,
                                       Side side, const HalParams& params) {
    const auto& gloves = trial.glove(side);
    std::vector<FingerForces> out;
    out.reserve(gloves.size());
    for (const GloveFrame& g : gloves)
        out.push_back(finger_sums(g, map, params.include_palm_in_total));
    return out;
}

namespace {

void series_for_side(const sync::SyncedTrial& trial, const TaxelMap& map,
                     const HalParams& params, Side side, std::vector<double>* scores,
                     std::vector<int>* counts) {
    std::vector<FingerForces> forces = force_series(trial, map, side, params);
    size_t n = forces.size();
    size_t w = static_cast<size_t>(params.window_ticks);
    if (scores) scores->assign(n, 0.0);
    if (counts) counts->assign(n, -1);
    // Every window is evaluated from a freshly armed counter; output k
    // covers ticks (k - window, k].
    for (size_t k = w; k < n; ++k) {
        ExertionCount c = count_exertions(
            std::span<const FingerForces>(forces.data() + (k - w + 1), w), params);
        if (scores) (*scores)[k] = hal_from_count(c, params);
        if (counts) (*counts)[k] = c.count;
    }
}

}  // namespace

ScoreSeries series(const sync::SyncedTrial& trial, const TaxelMap& map,
                   const HalParams& params) {
    params.validate();
    if (trial.size() < static_cast<size_t>(params.window_ticks))
        throw PreconditionError("hal_scorer",
                                "trial shorter than one HAL window (" +
                                    std::to_string(trial.size()) + " ticks, need >= " +
                                    std::to_string(params.window_ticks) + ")");
    ScoreSeries out;
    out.kind = "hal";
    series_for_side(trial, map, params, Side::Left, &out.left, nullptr);
    series_for_side(trial, map, params, Side::Right, &out.right, nullptr);
    return out;
}

WindowCounts recount_audit(const sync::SyncedTrial& trial, const TaxelMap& map,
                           const HalParams& params) {
    params.validate();
    if (trial.size() < static_cast<size_t>(params.window_ticks))
        throw PreconditionError("hal_scorer", "trial shorter than one HAL window");
    WindowCounts out;
    series_for_side(trial, map, params, Side::Left, nullptr, &out.left);
    series_for_side(trial, map, params, Side::Right, nullptr, &out.right);
    return out;
}

}  // namespace ergo::hal
