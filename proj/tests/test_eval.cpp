#include <doctest.h>

#include <algorithm>

#include "ergo/error.hpp"
#include "ergo/eval.hpp"
#include "ergo/mldata.hpp"
#include "ergo/rng.hpp"
#include "ergo/synth.hpp"
#include "helpers.hpp"

using namespace ergo;
using namespace ergo::eval;

TEST_CASE("rula scores bin into three risk levels") {
    CHECK(bin_rula(1) == RiskLevel::Low);
    CHECK(bin_rula(3) == RiskLevel::Low);
    CHECK(bin_rula(4) == RiskLevel::Medium);
    CHECK(bin_rula(5) == RiskLevel::Medium);
    CHECK(bin_rula(6) == RiskLevel::High);
    CHECK(bin_rula(7) == RiskLevel::High);
    CHECK_THROWS_AS(bin_rula(0), PreconditionError);
    CHECK_THROWS_AS(bin_rula(8), PreconditionError);
}

TEST_CASE("hal scores bin lower-inclusive at 4 and 8") {
    CHECK(bin_hal(0.0) == RiskLevel::Low);
    CHECK(bin_hal(3.9) == RiskLevel::Low);
    CHECK(bin_hal(4.0) == RiskLevel::Medium);
    CHECK(bin_hal(7.999) == RiskLevel::Medium);
    CHECK(bin_hal(8.0) == RiskLevel::High);
    CHECK(bin_hal(9.5) == RiskLevel::High);
    CHECK(bin_hal(10.0) == RiskLevel::High);
    CHECK_THROWS_AS(bin_hal(-0.1), PreconditionError);
    CHECK_THROWS_AS(bin_hal(10.1), PreconditionError);
}

TEST_CASE("conservative classification counts one-above as correct") {
    using RL = RiskLevel;
    std::vector<RL> truth{RL::Low, RL::Low, RL::Medium, RL::High};

    SUBCASE("exact predictions are 100 percent conservative") {
        ConservativeReport r = classification_report(truth, truth);
        CHECK(r.pct_correct_or_conservative == 100.0);
        CHECK(r.pct_off_by_one == 0.0);
        CHECK(r.pct_off_by_two == 0.0);
    }

    SUBCASE("one level above truth everywhere still scores 100") {
        std::vector<RL> all_low(4, RL::Low);
        std::vector<RL> all_medium(4, RL::Medium);
        ConservativeReport r = classification_report(all_medium, all_low);
        CHECK(r.pct_correct_or_conservative == 100.0);
    }

    SUBCASE("two-level misses land in the last column either way") {
        std::vector<RL> all_high(4, RL::High);
        std::vector<RL> all_low(4, RL::Low);
        ConservativeReport r = classification_report(all_low, all_high);
        CHECK(r.pct_correct_or_conservative == 0.0);
        CHECK(r.pct_off_by_two == 100.0);
        ConservativeReport r2 = classification_report(all_high, all_low);
        CHECK(r2.pct_off_by_two == 100.0);  // low truth predicted high
    }

    SUBCASE("one level below truth is the middle column") {
        std::vector<RL> t{RL::Medium, RL::High};
        std::vector<RL> p{RL::Low, RL::Medium};
        ConservativeReport r = classification_report(p, t);
        CHECK(r.pct_correct_or_conservative == 0.0);
        CHECK(r.pct_off_by_one == 100.0);
    }

    SUBCASE("length mismatch and empty input are rejected") {
        std::vector<RL> shorter{RL::Low};
        CHECK_THROWS_AS(classification_report(shorter, truth), PreconditionError);
        std::vector<RL> empty;
        CHECK_THROWS_AS(classification_report(empty, empty), PreconditionError);
    }

    SUBCASE("percentages sum to 100 and are invariant under joint permutation") {
        Rng rng(55);
        std::vector<RL> p, t;
        for (int i = 0; i < 200; ++i) {
            p.push_back(static_cast<RL>(rng.uniform_int(0, 2)));
            t.push_back(static_cast<RL>(rng.uniform_int(0, 2)));
        }
        ConservativeReport base = classification_report(p, t);
        CHECK(base.pct_correct_or_conservative + base.pct_off_by_one + base.pct_off_by_two ==
              doctest::Approx(100.0).epsilon(1e-4));
        std::vector<size_t> perm(p.size());
        for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        for (size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[rng.next_u64() % i]);
        std::vector<RL> p2(p.size()), t2(t.size());
        for (size_t i = 0; i < perm.size(); ++i) {
            p2[i] = p[perm[i]];
            t2[i] = t[perm[i]];
        }
        ConservativeReport shuffled = classification_report(p2, t2);
        CHECK(shuffled.pct_correct_or_conservative == base.pct_correct_or_conservative);
        CHECK(shuffled.pct_off_by_one == base.pct_off_by_one);
        CHECK(shuffled.pct_off_by_two == base.pct_off_by_two);
    }
}

TEST_CASE("fold assembly asserts id disjointness") {
    verify_fold_disjoint({"P1", "P2"}, "P3");
    CHECK_THROWS_WITH_AS(verify_fold_disjoint({"P1", "P3"}, "P3"),
                         doctest::Contains("held-out"), PreconditionError);
}

TEST_CASE("leave-one-out needs at least two participants") {
    std::vector<EvalTrial> one;
    one.push_back({"P1", "stringer",
                   sync::synchronize(synth::generate_trial(testing::active_scenario(3.0), 1))});
    RulaEvalConfig cfg;
    CHECK_THROWS_AS(leave_one_out_rula(one, rula::Tables::builtin(), cfg), PreconditionError);
}

TEST_CASE("holdout over near-identical participants beats the majority baseline") {
    // two participants generated from the same scenario, different seeds
    synth::Scenario sc = testing::active_scenario(8.0);
    sc.amp_jitter_pct = 5.0;
    std::vector<EvalTrial> trials;
    for (uint64_t seed : {1ull, 2ull}) {
        synth::Scenario each = sc;
        each.participant_id = "P" + std::to_string(seed);
        trials.push_back({each.participant_id, each.tool,
                          sync::synchronize(synth::generate_trial(each, seed))});
    }
    RulaEvalConfig cfg;
    cfg.train_stride = 4;
    cfg.eval_stride = 4;
    std::vector<HoldoutRun> runs = leave_one_out_rula(trials, rula::Tables::builtin(), cfg);
    REQUIRE(!runs.empty());

    // oracle: the majority-class baseline from the pooled label frequencies
    mldata::RulaDataset all;
    for (const EvalTrial& t : trials)
        mldata::append(all, mldata::rula_dataset(t.trial, rula::Tables::builtin(), cfg.adjustments,
                                         cfg.angles, cfg.eval_stride));
    std::array<size_t, 3> counts{};
    for (int y : all.labels) ++counts[y];
    size_t majority = *std::max_element(counts.begin(), counts.end());
    double baseline = 100.0 * static_cast<double>(majority) /
                      static_cast<double>(all.labels.size());
    for (const HoldoutRun& run : runs) {
        CHECK(run.report.pct_correct_or_conservative >= baseline - 1e-9);
        CHECK(run.model_kind == "rula_gbdt");
        CHECK(run.report.pct_correct_or_conservative + run.report.pct_off_by_one +
                  run.report.pct_off_by_two ==
              doctest::Approx(100.0).epsilon(1e-4));
    }
    // one run per (participant, tool, side)
    CHECK(runs.size() == 4u);
}

TEST_CASE("reports render as csv, aligned text and json") {
    std::vector<HoldoutRun> runs;
    runs.push_back({"P1", "stringer", Side::Right, "rula_gbdt", {97.25, 2.5, 0.25, 400}});
    runs.push_back({"P2", "stringer", Side::Right, "rula_gbdt", {91.0, 8.0, 1.0, 400}});
    Producer producer{"evaluate", "cafe0123", 5};

    std::string csv = report_csv(runs, producer);
    CHECK(csv.find("# ergo evaluate config=cafe0123 seed=5") == 0);
    CHECK(csv.find("rula_gbdt,stringer,right,P1,97.25,2.5,0.25,400") != std::string::npos);

    std::string text = report_text(runs);
    CHECK(text.find("Right Side, stringer") != std::string::npos);
    CHECK(text.find("P1") != std::string::npos);
    CHECK(text.find("97.25") != std::string::npos);

    nlohmann::json doc = report_json(runs, producer);
    CHECK(doc["runs"].size() == 2);
    CHECK(doc["runs"][0]["participant"] == "P1");
    CHECK(doc["producer"]["seed"] == 5);
}
