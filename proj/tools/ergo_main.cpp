#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ergo/bach.hpp"
#include "ergo/config.hpp"
#include "ergo/error.hpp"
#include "ergo/eval.hpp"
#include "ergo/gbdt.hpp"
#include "ergo/gru.hpp"
#include "ergo/hal.hpp"
#include "ergo/io_util.hpp"
#include "ergo/mldata.hpp"
#include "ergo/rula.hpp"
#include "ergo/streams.hpp"
#include "ergo/sync.hpp"
#include "ergo/synth.hpp"
#include "ergo/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ergo;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitPrecondition = 4;

struct AppContext {
    Config config;
    uint64_t seed = 0;
    std::string config_hash;

    Producer producer(const std::string& subcommand) const {
        return {subcommand, config_hash, seed};
    }
};

streams::LoadOptions load_options(const Config& cfg) {
    streams::LoadOptions opts;
    opts.saturation_ceiling_n =
        cfg.get_double("streams.saturation_ceiling_n", opts.saturation_ceiling_n);
    return opts;
}

sync::SyncOptions sync_options(const Config& cfg) {
    sync::SyncOptions opts;
    opts.saturation_ceiling_n =
        cfg.get_double("streams.saturation_ceiling_n", opts.saturation_ceiling_n);
    return opts;
}

rula::RulaAdjustments rula_adjustments(const Config& cfg) {
    rula::RulaAdjustments adj;
    adj.muscle_use = cfg.get_int("rula.muscle_use", adj.muscle_use);
    adj.force_load = cfg.get_int("rula.force_load", adj.force_load);
    adj.leg_score = cfg.get_int("rula.leg_score", adj.leg_score);
    adj.validate();
    return adj;
}

rula::AngleConfig angle_config(const Config& cfg) {
    rula::AngleConfig ac;
    ac.wrist_deviation_threshold_deg =
        cfg.get_double("rula.wrist_deviation_threshold_deg", ac.wrist_deviation_threshold_deg);
    ac.shoulder_raised_clearance_m =
        cfg.get_double("rula.shoulder_raised_clearance_m", ac.shoulder_raised_clearance_m);
    ac.cross_midline_clearance_m =
        cfg.get_double("rula.cross_midline_clearance_m", ac.cross_midline_clearance_m);
    ac.twist_threshold_deg = cfg.get_double("rula.twist_threshold_deg", ac.twist_threshold_deg);
    ac.wrist_twist_score = cfg.get_int("rula.wrist_twist_score", ac.wrist_twist_score);
    return ac;
}

rula::Tables rula_tables(const Config& cfg) {
    std::string path = cfg.get_string("rula.tables_path", "");
    return path.empty() ? rula::Tables::builtin() : rula::Tables::load(path);
}

TaxelMap taxel_map(const Config& cfg) {
    std::string path = cfg.get_string("streams.taxel_map_path", "");
    return path.empty() ? TaxelMap::default_map() : TaxelMap::from_json_file(path);
}

bach::BachConfig bach_config(const Config& cfg) {
    bach::BachConfig bc;
    std::string scalar = cfg.get_string("bach.torque_scalar", "magnitude");
    if (scalar == "magnitude") bc.scalar = bach::TorqueScalar::Magnitude;
    else if (scalar == "flexion_component") bc.scalar = bach::TorqueScalar::FlexionComponent;
    else throw ParseError("bach_scorer", "bach.torque_scalar must be magnitude or flexion_component");
    return bc;
}

sync::SyncedTrial synced_from_manifest(const AppContext& ctx, const std::string& manifest) {
    TrialBundle bundle = streams::load_bundle(manifest, load_options(ctx.config));
    return sync::synchronize(bundle, sync_options(ctx.config));
}

void write_score_csv(const std::string& path, const ScoreSeries& series,
                     const Producer& producer, bool integer_scores) {
    std::string left_col = series.kind == "rula" ? "left" : "left_" + series.kind;
    std::string right_col = series.kind == "rula" ? "right" : "right_" + series.kind;
    std::string out = producer.csv_header();
    out += "tick," + left_col + "," + right_col + "\n";
    for (size_t i = 0; i < series.size(); ++i) {
        out += std::to_string(i);
        if (integer_scores) {
            out += ',' + std::to_string(static_cast<long>(series.left[i]));
            out += ',' + std::to_string(static_cast<long>(series.right[i]));
        } else {
            out += ',' + format_double(series.left[i]);
            out += ',' + format_double(series.right[i]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

int run_validate(const AppContext& ctx, const std::string& manifest) {
    TrialBundle bundle = streams::load_bundle(manifest, load_options(ctx.config));
    streams::ValidationReport report = streams::validate_bundle(bundle);
    json doc = report.to_json();
    doc["producer"] = {{"subcommand", "validate"},
                       {"config_hash", ctx.config_hash},
                       {"seed", ctx.seed}};
    std::cout << doc.dump(2) << "\n";
    return report.fatal() ? kExitValidation : 0;
}

int run_synth(const AppContext& ctx, const std::string& spec_path, const std::string& out_dir,
              const std::string& manifest_name) {
    synth::Scenario scenario = synth::Scenario::from_config(Config::load(spec_path));
    TrialBundle bundle = synth::generate_trial(scenario, ctx.seed);
    std::string manifest =
        streams::save_bundle(bundle, out_dir, manifest_name, ctx.producer("synth"));
    std::cout << manifest << "\n";
    return 0;
}

int run_sync(const AppContext& ctx, const std::string& manifest, const std::string& out_prefix) {
    sync::SyncedTrial trial = synced_from_manifest(ctx, manifest);
    sync::write_csv(trial, out_prefix + ".csv", out_prefix + ".columns.json",
                    ctx.producer("sync"), sync_options(ctx.config));
    std::cout << out_prefix << ".csv\n";
    return 0;
}

int run_score(const AppContext& ctx, const std::string& which, const std::string& manifest,
              const std::string& out_dir, bool recount_audit, bool diagnostics) {
    sync::SyncedTrial trial = synced_from_manifest(ctx, manifest);
    fs::create_directories(out_dir);
    TaxelMap map = taxel_map(ctx.config);

    bool all = which == "all";
    if (all || which == "rula") {
        ScoreSeries s = rula::series(trial, rula_tables(ctx.config),
                                     rula_adjustments(ctx.config), angle_config(ctx.config));
        write_score_csv((fs::path(out_dir) / "rula.csv").string(), s,
                        ctx.producer("score-rula"), true);
    }
    if (all || which == "hal") {
        hal::HalParams params = hal::HalParams::from_config(ctx.config);
        ScoreSeries s = hal::series(trial, map, params);
        write_score_csv((fs::path(out_dir) / "hal.csv").string(), s, ctx.producer("score-hal"),
                        false);
        if (recount_audit) {
            hal::WindowCounts counts = hal::recount_audit(trial, map, params);
            std::string out = ctx.producer("score-hal").csv_header();
            out += "tick,left_count,right_count\n";
            for (size_t i = 0; i < counts.left.size(); ++i)
                out += std::to_string(i) + ',' + std::to_string(counts.left[i]) + ',' +
                       std::to_string(counts.right[i]) + '\n';
            write_text_file((fs::path(out_dir) / "hal_audit.csv").string(), out);
        }
    }
    if (all || which == "bach") {
        bach::BachConfig bc = bach_config(ctx.config);
        ScoreSeries s = bach::series(trial, map, bc);
        write_score_csv((fs::path(out_dir) / "bach.csv").string(), s,
                        ctx.producer("score-bach"), false);
        if (diagnostics) {
            bach::Diagnostics diag = bach::diagnostics(trial, map, bc);
            std::string out = ctx.producer("score-bach").csv_header();
            out += "tick,left_tau,left_theta_deg,left_alpha,left_bach,right_tau,"
                   "right_theta_deg,right_alpha,right_bach\n";
            for (size_t i = 0; i < diag.left.size(); ++i) {
                out += std::to_string(i);
                for (const bach::FrameDiag* f : {&diag.left[i], &diag.right[i]})
                    out += ',' + format_double(f->tau) + ',' + format_double(f->theta_deg) +
                           ',' + format_double(f->alpha) + ',' + format_double(f->score);
                out += '\n';
            }
            write_text_file((fs::path(out_dir) / "bach_diag.csv").string(), out);
        }
    }
    std::cout << out_dir << "\n";
    return 0;
}

int run_train(const AppContext& ctx, const std::string& kind,
              const std::vector<std::string>& manifests, const std::string& out_path,
              const std::string& loss_trace_path) {
    json producer = {{"subcommand", "train-" + kind},
                     {"config_hash", ctx.config_hash},
                     {"seed", ctx.seed}};
    std::vector<double> loss_trace;
    if (kind == "rula-gbdt") {
        mldata::RulaDataset dataset;
        rula::Tables tables = rula_tables(ctx.config);
        rula::RulaAdjustments adj = rula_adjustments(ctx.config);
        rula::AngleConfig ac = angle_config(ctx.config);
        int stride = ctx.config.get_int("train.frame_stride", 2);
        for (const std::string& manifest : manifests)
            append(dataset, mldata::rula_dataset(synced_from_manifest(ctx, manifest), tables,
                                                 adj, ac, stride));
        gbdt::TrainConfig cfg;
        cfg.n_estimators = ctx.config.get_int("train.n_estimators", cfg.n_estimators);
        cfg.limits.max_depth = ctx.config.get_int("train.max_depth", cfg.limits.max_depth);
        cfg.limits.max_leaves = ctx.config.get_int("train.max_leaves", cfg.limits.max_leaves);
        cfg.learning_rate =
            ctx.config.get_double("train.gbdt_learning_rate", cfg.learning_rate);
        cfg.seed = ctx.seed;
        gbdt::TrainResult result = gbdt::train(dataset.features, dataset.labels, cfg);
        result.model.feature_names = mldata::rula_feature_names();
        result.model.save(out_path, producer);
        loss_trace = result.loss_trace;
    } else {
        gru::Dataset dataset;
        TaxelMap map = taxel_map(ctx.config);
        hal::HalParams params = hal::HalParams::from_config(ctx.config);
        int stride = ctx.config.get_int("train.window_stride", mldata::kDefaultWindowStride);
        for (const std::string& manifest : manifests) {
            sync::SyncedTrial trial = synced_from_manifest(ctx, manifest);
            for (Side side : {Side::Left, Side::Right})
                mldata::append(dataset,
                               mldata::hal_window_dataset(trial, map, params, side, stride));
        }
        gru::TrainConfig cfg;
        cfg.seed = ctx.seed;
        cfg.epochs = ctx.config.get_int("train.epochs", cfg.epochs);
        cfg.learning_rate = ctx.config.get_double("train.learning_rate", cfg.learning_rate);
        cfg.dropout = ctx.config.get_double("train.dropout", cfg.dropout);
        gru::TrainResult result = gru::train(dataset, cfg);
        result.params.save(out_path, producer);
        loss_trace = result.loss_trace;
    }
    if (!loss_trace_path.empty()) {
        std::string out = ctx.producer("train-" + kind).csv_header();
        out += "step,loss\n";
        for (size_t i = 0; i < loss_trace.size(); ++i)
            out += std::to_string(i) + ',' + format_double(loss_trace[i]) + '\n';
        write_text_file(loss_trace_path, out);
    }
    std::cout << out_path << "\n";
    return 0;
}

int run_evaluate(const AppContext& ctx, const std::string& kind,
                 const std::vector<std::string>& manifests, const std::string& out_dir) {
    std::vector<eval::EvalTrial> trials;
    for (const std::string& manifest : manifests) {
        TrialBundle bundle = streams::load_bundle(manifest, load_options(ctx.config));
        eval::EvalTrial et;
        et.participant = bundle.participant_id;
        et.tool = bundle.tool;
        et.trial = sync::synchronize(bundle, sync_options(ctx.config));
        trials.push_back(std::move(et));
    }
    std::vector<eval::HoldoutRun> runs;
    if (kind == "rula-gbdt") {
        eval::RulaEvalConfig cfg;
        cfg.adjustments = rula_adjustments(ctx.config);
        cfg.angles = angle_config(ctx.config);
        cfg.train.seed = ctx.seed;
        cfg.train.n_estimators = ctx.config.get_int("train.n_estimators", cfg.train.n_estimators);
        cfg.train_stride = ctx.config.get_int("evaluate.train_stride", cfg.train_stride);
        cfg.eval_stride = ctx.config.get_int("evaluate.eval_stride", cfg.eval_stride);
        runs = eval::leave_one_out_rula(trials, rula_tables(ctx.config), cfg);
    } else {
        eval::HalEvalConfig cfg;
        cfg.params = hal::HalParams::from_config(ctx.config);
        cfg.map = taxel_map(ctx.config);
        cfg.train.seed = ctx.seed;
        cfg.train.epochs = ctx.config.get_int("train.epochs", cfg.train.epochs);
        cfg.train.learning_rate =
            ctx.config.get_double("train.learning_rate", cfg.train.learning_rate);
        cfg.train_stride = ctx.config.get_int("evaluate.train_stride", cfg.train_stride);
        cfg.eval_stride = ctx.config.get_int("evaluate.eval_stride", cfg.eval_stride);
        runs = eval::leave_one_out_gru(trials, cfg);
    }
    fs::create_directories(out_dir);
    Producer producer = ctx.producer("evaluate");
    write_text_file((fs::path(out_dir) / "report.csv").string(),
                    eval::report_csv(runs, producer));
    write_text_file((fs::path(out_dir) / "report.txt").string(), eval::report_text(runs));
    write_text_file((fs::path(out_dir) / "report.json").string(),
                    eval::report_json(runs, producer).dump(2) + "\n");
    std::cout << (fs::path(out_dir) / "report.txt").string() << "\n";
    return 0;
}

int run_report(const AppContext& ctx, const std::string& scores_dir,
               const std::string& out_path) {
    std::string out = ctx.producer("report").csv_header();
    out += "tick,score_kind,side,value\n";
    bool found = false;
    for (const char* kind : {"rula", "hal", "bach"}) {
        fs::path path = fs::path(scores_dir) / (std::string(kind) + ".csv");
        if (!fs::exists(path)) continue;
        found = true;
        std::istringstream in(read_text_file(path.string()));
        std::string line;
        bool header_seen = false;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (!header_seen) {
                header_seen = true;
                continue;
            }
            size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos)
                throw ParseError("cli", "malformed score csv row in " + path.string());
            std::string tick = line.substr(0, c1);
            out += tick + ',' + kind + ",left," + line.substr(c1 + 1, c2 - c1 - 1) + '\n';
            out += tick + ',' + kind + ",right," + line.substr(c2 + 1) + '\n';
        }
    }
    if (!found)
        throw ValidationError("cli", "no score csv files found in " + scores_dir);
    write_text_file(out_path, out);
    std::cout << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergo: multi-modal ergonomic risk scoring pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global --seed/--config may follow the subcommand

    std::string config_path;
    uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--config", config_path,
                   "layered key-value config file (env ERGO_CONFIG)");
    app.add_option("--seed", seed, "run seed, recorded in every artifact")
        ->each([&](const std::string&) { seed_given = true; });

    auto* cmd_validate = app.add_subcommand("validate", "check a trial bundle");
    std::string v_bundle;
    cmd_validate->add_option("--bundle", v_bundle, "bundle manifest")->required();

    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic trial bundle");
    std::string sy_spec, sy_out, sy_manifest = "manifest.json";
    cmd_synth->add_option("--spec", sy_spec, "scenario config file")->required();
    cmd_synth->add_option("--out", sy_out, "output directory")->required();
    cmd_synth->add_option("--manifest", sy_manifest, "manifest file name");

    auto* cmd_sync = app.add_subcommand("sync", "synchronize a bundle to 60 Hz");
    std::string sn_bundle, sn_out;
    cmd_sync->add_option("--bundle", sn_bundle, "bundle manifest")->required();
    cmd_sync->add_option("--out", sn_out, "output prefix (.csv / .columns.json)")->required();

    auto* cmd_score = app.add_subcommand("score", "compute risk score series");
    std::string sc_which, sc_bundle, sc_out;
    bool sc_audit = false, sc_diag = false;
    cmd_score->add_option("kind", sc_which, "rula | hal | bach | all")
        ->required()
        ->check(CLI::IsMember({"rula", "hal", "bach", "all"}));
    cmd_score->add_option("--bundle", sc_bundle, "bundle manifest")->required();
    cmd_score->add_option("--out", sc_out, "output directory")->required();
    cmd_score->add_flag("--recount-audit", sc_audit, "dump per-window exertion counts");
    cmd_score->add_flag("--diagnostics", sc_diag, "dump per-frame BACH torque/angle/alpha");

    auto* cmd_train = app.add_subcommand("train", "train a predictor");
    std::string tr_kind, tr_out, tr_trace;
    std::vector<std::string> tr_bundles;
    cmd_train->add_option("kind", tr_kind, "rula-gbdt | hal-gru")
        ->required()
        ->check(CLI::IsMember({"rula-gbdt", "hal-gru"}));
    cmd_train->add_option("--bundle", tr_bundles, "bundle manifest (repeatable)")
        ->required()
        ->take_all();
    cmd_train->add_option("--out", tr_out, "model file")->required();
    cmd_train->add_option("--loss-trace", tr_trace, "training loss CSV");

    auto* cmd_eval = app.add_subcommand("evaluate", "leave-one-participant-out validation");
    std::string ev_kind, ev_out;
    std::vector<std::string> ev_bundles;
    cmd_eval->add_option("--model", ev_kind, "rula-gbdt | hal-gru")
        ->required()
        ->check(CLI::IsMember({"rula-gbdt", "hal-gru"}));
    cmd_eval->add_option("--bundle", ev_bundles, "bundle manifest (repeatable)")
        ->required()
        ->take_all();
    cmd_eval->add_option("--out", ev_out, "report directory")->required();

    auto* cmd_report = app.add_subcommand("report", "emit tidy long-format score CSV");
    std::string rp_scores, rp_out;
    cmd_report->add_option("--scores", rp_scores, "directory holding score CSVs")->required();
    cmd_report->add_option("--out", rp_out, "tidy CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        AppContext ctx;
        if (config_path.empty()) {
            const char* env = std::getenv("ERGO_CONFIG");
            if (env != nullptr && *env != '\0') config_path = env;
        }
        if (!config_path.empty()) ctx.config = Config::load(config_path);
        if (seed_given) {
            ctx.seed = seed;
        } else {
            ctx.seed = static_cast<uint64_t>(ctx.config.get_int("run.seed", 0));
        }
        // the hash covers the file content plus every effective override
        Config hashed = ctx.config;
        hashed.set("run.seed", std::to_string(ctx.seed));
        ctx.config_hash = hashed.hash();

        if (cmd_validate->parsed()) return run_validate(ctx, v_bundle);
        if (cmd_synth->parsed()) return run_synth(ctx, sy_spec, sy_out, sy_manifest);
        if (cmd_sync->parsed()) return run_sync(ctx, sn_bundle, sn_out);
        if (cmd_score->parsed())
            return run_score(ctx, sc_which, sc_bundle, sc_out, sc_audit, sc_diag);
        if (cmd_train->parsed()) return run_train(ctx, tr_kind, tr_bundles, tr_out, tr_trace);
        if (cmd_eval->parsed()) return run_evaluate(ctx, ev_kind, ev_bundles, ev_out);
        if (cmd_report->parsed()) return run_report(ctx, rp_scores, rp_out);
        std::cerr << "{\"error\":\"no subcommand\",\"module\":\"cli\"}\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        std::cerr << json{{"error", e.what()}, {"module", e.module()}}.dump() << "\n";
        return kExitPrecondition;
    } catch (const ParseError& e) {
        std::cerr << json{{"error", e.what()}, {"module", e.module()}}.dump() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << json{{"error", e.what()}, {"module", e.module()}}.dump() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << json{{"error", e.what()}, {"module", e.module()}}.dump() << "\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"module", "cli"}}.dump() << "\n";
        return kExitPrecondition;
    }
}
