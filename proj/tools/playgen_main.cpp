#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "playgen/checkpoint.hpp"
#include "playgen/config.hpp"
#include "playgen/container.hpp"
#include "playgen/core.hpp"
#include "playgen/dataset.hpp"
#include "playgen/evalkit.hpp"
#include "playgen/ingest.hpp"
#include "playgen/planner.hpp"
#include "playgen/render.hpp"
#include "playgen/train.hpp"

namespace fs = std::filesystem;
using namespace playgen;

namespace {

std::string resolve_out(const std::string& flag_value, const std::string& default_name) {
    if (!flag_value.empty()) {
        return flag_value;
    }
    const char* env = std::getenv("PLAYGEN_OUT_DIR");
    if (env != nullptr && *env != '\0') {
        return std::string(env) + "/" + default_name;
    }
    throw UsageError("no output path given and PLAYGEN_OUT_DIR is not set");
}

void ensure_parent(const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
}

nlohmann::json checkpoint_provenance(const std::string& denoiser_path,
                                     const std::string& value_path) {
    return {
        {"denoiser",
         {{"path", denoiser_path},
          {"fingerprint", fingerprint_hex(file_fingerprint(denoiser_path))}}},
        {"value",
         {{"path", value_path}, {"fingerprint", fingerprint_hex(file_fingerprint(value_path))}}},
    };
}

void require_compatible_or_refuse(const Checkpoint& denoiser, const Checkpoint& value,
                                  const std::string& denoiser_path, const std::string& value_path) {
    try {
        require_compatible(denoiser, value);
    } catch (const DataError& e) {
        throw DataError(std::string(e.what()) + " (denoiser " +
                        fingerprint_hex(file_fingerprint(denoiser_path)) + " vs value " +
                        fingerprint_hex(file_fingerprint(value_path)) + ")");
    }
}

std::array<double, kStateDim> initial_state_from_dataset(const std::string& dataset_dir,
                                                         int index) {
    const Dataset ds = load_dataset(dataset_dir);
    if (ds.examples.empty()) {
        throw DataError("dataset has no examples: " + dataset_dir);
    }
    const int n = static_cast<int>(ds.examples.size());
    const TrajectoryTensor init =
        denormalize(ds.examples[static_cast<std::size_t>(((index % n) + n) % n)].tensor, ds.stats);
    std::array<double, kStateDim> s{};
    for (int d = 0; d < kStateDim; ++d) {
        s[static_cast<std::size_t>(d)] = init.at(0, d);
    }
    return s;
}

struct CommonOpts {
    std::string config_path;
};

RunConfig load_config(const CommonOpts& common) {
    RunConfig cfg;
    if (!common.config_path.empty()) {
        cfg = RunConfig::from_file(common.config_path);
    }
    return cfg;
}

int run(int argc, char** argv) {
    CLI::App app{"Basketball possession synthesis: diffusion training, value-guided planning, "
                 "and evaluation"};
    app.require_subcommand(1);

    // --- ingest ---------------------------------------------------------
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse tracking + play-by-play files into a "
                                                    "possession index and frame store");
    std::string in_motion, in_pbp, ingest_out;
    CommonOpts ingest_common;
    ingest_cmd->add_option("--motion", in_motion, "Motion JSON file")->required();
    ingest_cmd->add_option("--pbp", in_pbp, "Play-by-play CSV file")->required();
    ingest_cmd->add_option("--out", ingest_out, "Output directory");
    ingest_cmd->add_option("--config", ingest_common.config_path, "Config file");
    ingest_cmd->callback([&]() {
        if (!fs::exists(in_motion)) {
            throw DataError("motion file does not exist: " + in_motion);
        }
        if (!fs::exists(in_pbp)) {
            throw DataError("play-by-play file does not exist: " + in_pbp);
        }
        const std::string out_dir = resolve_out(ingest_out, "ingest");
        fs::create_directories(out_dir);

        const MotionData motion = parse_motion_file(in_motion);
        const PbpData pbp = parse_pbp_file(in_pbp);
        const std::vector<Frame> frames = motion.all_frames();
        const auto records = segment_possessions(motion.game_id, frames, pbp.events);

        write_possession_index(out_dir + "/" + motion.game_id + ".possessions.json", records);
        write_frame_store(out_dir + "/" + motion.game_id + ".frames.bin", motion.game_id, frames);

        const double minutes = static_cast<double>(frames.size()) / 25.0 / 60.0;
        std::printf("game %s\n", motion.game_id.c_str());
        std::printf("  %-12s %zu\n", "frames", frames.size());
        std::printf("  %-12s %.1f\n", "minutes", minutes);
        std::printf("  %-12s %zu\n", "possessions", records.size());
        if (motion.skipped_moments > 0) {
            std::printf("  warning: skipped %d malformed moments\n", motion.skipped_moments);
        }
    });

    // --- synth ----------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic game in the ingest "
                                                  "formats plus a ground-truth sidecar");
    std::string synth_out;
    SyntheticSpec synth_spec;
    std::string synth_script = "mixed";
    synth_cmd->add_option("--out", synth_out, "Output prefix");
    synth_cmd->add_option("--possessions", synth_spec.n_possessions, "Possession count");
    synth_cmd->add_option("--seed", synth_spec.seed, "RNG seed");
    synth_cmd->add_option("--script", synth_script, "drive | perimeter_pass | mixed");
    synth_cmd->add_option("--frames-min", synth_spec.frames_min, "Min frames per possession");
    synth_cmd->add_option("--frames-max", synth_spec.frames_max, "Max frames per possession");
    synth_cmd->add_option("--score-prob", synth_spec.score_prob_at_rim, "Score prob at the rim");
    synth_cmd->callback([&]() {
        synth_spec.script = offense_script_from_name(synth_script);
        const std::string prefix = resolve_out(synth_out, "synth");
        ensure_parent(prefix);
        const SyntheticResult result = generate_synthetic(synth_spec);
        write_synthetic(prefix, result);
        std::size_t frames = 0;
        for (const auto& ev : result.motion.events) {
            frames += ev.frames.size();
        }
        std::printf("wrote %s.motion.json / .pbp.csv / .sidecar.csv (%d possessions, %zu frames)\n",
                    prefix.c_str(), synth_spec.n_possessions, frames);
    });

    // --- dataset --------------------------------------------------------
    auto* dataset_cmd = app.add_subcommand("dataset", "Build normalized trajectory tensors from "
                                                      "ingested games");
    std::string ds_ingest_dir, ds_out;
    int ds_horizon = 0;
    CommonOpts ds_common;
    dataset_cmd->add_option("--ingest-dir", ds_ingest_dir, "Directory produced by ingest")
        ->required();
    dataset_cmd->add_option("--out", ds_out, "Output dataset directory");
    dataset_cmd->add_option("--horizon", ds_horizon, "Planning horizon H");
    dataset_cmd->add_option("--config", ds_common.config_path, "Config file");
    dataset_cmd->callback([&]() {
        RunConfig cfg = load_config(ds_common);
        int horizon = ds_horizon > 0 ? ds_horizon : cfg.model.horizon;
        const int factor = cfg.model_config(((horizon + 3) / 4) * 4).downsample_factor();
        if (horizon % factor != 0) {
            const int rounded = ((horizon + factor - 1) / factor) * factor;
            std::printf("horizon %d padded to %d (downsampling factor %d)\n", horizon, rounded,
                        factor);
            horizon = rounded;
        }

        std::vector<IngestedGame> games;
        for (const auto& entry : fs::directory_iterator(ds_ingest_dir)) {
            const std::string name = entry.path().filename().string();
            const std::string suffix = ".possessions.json";
            if (name.size() <= suffix.size() ||
                name.substr(name.size() - suffix.size()) != suffix) {
                continue;
            }
            IngestedGame game;
            game.game_id = name.substr(0, name.size() - suffix.size());
            game.records = read_possession_index(entry.path().string());
            game.frames =
                read_frame_store(ds_ingest_dir + "/" + game.game_id + ".frames.bin", nullptr);
            games.push_back(std::move(game));
        }
        if (games.empty()) {
            throw DataError("no ingested games found in " + ds_ingest_dir);
        }
        std::sort(games.begin(), games.end(),
                  [](const IngestedGame& a, const IngestedGame& b) { return a.game_id < b.game_id; });

        const Dataset ds = build_dataset_games(games, horizon);
        const std::string out_dir = resolve_out(ds_out, "dataset");
        save_dataset(out_dir, ds);
        std::printf("dataset: %zu examples, horizon %d -> %s\n", ds.examples.size(), horizon,
                    out_dir.c_str());
    });

    // --- train-diffusion / train-value -----------------------------------
    struct TrainArgs {
        std::string data_dir;
        std::string out_path;
        CommonOpts common;
        int steps = -1;
        int batch = -1;
        double lr = -1.0;
        std::int64_t seed = -1;
    };
    auto add_train_cmd = [&](const char* name, const char* help, TrainArgs& args) {
        auto* cmd = app.add_subcommand(name, help);
        cmd->add_option("--data", args.data_dir, "Dataset directory")->required();
        cmd->add_option("--out", args.out_path, "Checkpoint output path");
        cmd->add_option("--config", args.common.config_path, "Config file");
        cmd->add_option("--steps", args.steps, "Training steps");
        cmd->add_option("--batch", args.batch, "Batch size");
        cmd->add_option("--lr", args.lr, "Learning rate");
        cmd->add_option("--seed", args.seed, "Training seed");
        return cmd;
    };
    auto resolve_train = [](const TrainArgs& args, RunConfig& cfg) {
        if (args.steps > 0) {
            cfg.train.steps = args.steps;
        }
        if (args.batch > 0) {
            cfg.train.batch = args.batch;
        }
        if (args.lr > 0.0) {
            cfg.train.lr = args.lr;
        }
        if (args.seed >= 0) {
            cfg.train.seed = static_cast<std::uint64_t>(args.seed);
        }
        TrainHyper hp;
        hp.steps = cfg.train.steps;
        hp.batch = cfg.train.batch;
        hp.lr = cfg.train.lr;
        hp.seed = cfg.train.seed;
        hp.snapshot_every = cfg.train.snapshot_every;
        return hp;
    };

    TrainArgs tdiff;
    auto* tdiff_cmd = add_train_cmd("train-diffusion", "Train the trajectory denoiser", tdiff);
    tdiff_cmd->callback([&]() {
        RunConfig cfg = load_config(tdiff.common);
        const TrainHyper hp = resolve_train(tdiff, cfg);
        const Dataset ds = load_dataset(tdiff.data_dir);
        const UNetConfig arch = cfg.model_config(ds.horizon);
        const NoiseSchedule schedule =
            make_schedule(cfg.model.diffusion_steps, schedule_kind_from_name(cfg.model.schedule));

        TemporalUNet net(arch, hp.seed);
        const TrainResult result = train_diffusion(net, ds, schedule, hp);

        const std::string out_path = resolve_out(tdiff.out_path, "denoiser.ckpt");
        ensure_parent(out_path);
        save_checkpoint(out_path, snapshot_denoiser(net, schedule, ds.stats, hp.seed));
        write_loss_curve(out_path + ".loss.csv", result.loss_curve);
        if (result.aborted) {
            std::fprintf(stderr,
                         "training aborted: non-finite loss at step %d; last good checkpoint "
                         "written to %s\n",
                         result.abort_step, out_path.c_str());
            throw NumericError("diffusion training diverged");
        }
        std::printf("denoiser checkpoint %s (final loss %.6f, fingerprint %s)\n", out_path.c_str(),
                    result.loss_curve.empty() ? 0.0 : result.loss_curve.back(),
                    fingerprint_hex(file_fingerprint(out_path)).c_str());
    });

    TrainArgs tval;
    auto* tval_cmd = add_train_cmd("train-value", "Train the return predictor", tval);
    tval_cmd->callback([&]() {
        RunConfig cfg = load_config(tval.common);
        const TrainHyper hp = resolve_train(tval, cfg);
        const Dataset ds = load_dataset(tval.data_dir);
        const UNetConfig arch = cfg.model_config(ds.horizon);
        const NoiseSchedule schedule =
            make_schedule(cfg.model.diffusion_steps, schedule_kind_from_name(cfg.model.schedule));

        ValueNet net(arch, derive_seed(hp.seed, 0x5a5aull));
        const TrainResult result = train_value(net, ds, schedule, hp);

        const std::string out_path = resolve_out(tval.out_path, "value.ckpt");
        ensure_parent(out_path);
        save_checkpoint(out_path, snapshot_value(net, schedule, ds.stats, hp.seed));
        write_loss_curve(out_path + ".loss.csv", result.loss_curve);
        if (result.aborted) {
            std::fprintf(stderr,
                         "training aborted: non-finite loss at step %d; last good checkpoint "
                         "written to %s\n",
                         result.abort_step, out_path.c_str());
            throw NumericError("value training diverged");
        }
        std::printf("value checkpoint %s (final loss %.6f, fingerprint %s)\n", out_path.c_str(),
                    result.loss_curve.empty() ? 0.0 : result.loss_curve.back(),
                    fingerprint_hex(file_fingerprint(out_path)).c_str());
    });

    // --- plan -------------------------------------------------------------
    auto* plan_cmd = app.add_subcommand("plan", "Sample guided trajectories from checkpoints");
    std::string plan_denoiser, plan_value, plan_out, plan_init_from;
    CommonOpts plan_common;
    double plan_alpha = -1.0;
    int plan_batch = -1;
    std::int64_t plan_seed = -1;
    int plan_init_index = 0;
    plan_cmd->add_option("--denoiser", plan_denoiser, "Denoiser checkpoint")->required();
    plan_cmd->add_option("--value", plan_value, "Value checkpoint")->required();
    plan_cmd->add_option("--out", plan_out, "Plan output file");
    plan_cmd->add_option("--config", plan_common.config_path, "Config file");
    plan_cmd->add_option("--alpha", plan_alpha, "Guidance scale");
    plan_cmd->add_option("--batch", plan_batch, "Trajectories to sample");
    plan_cmd->add_option("--seed", plan_seed, "Plan seed");
    plan_cmd->add_option("--init-from", plan_init_from, "Dataset dir for the initial state")
        ->required();
    plan_cmd->add_option("--init-index", plan_init_index, "Example index for the initial state");
    plan_cmd->callback([&]() {
        RunConfig cfg = load_config(plan_common);
        if (plan_alpha >= 0.0) {
            cfg.plan.alpha = plan_alpha;
        }
        if (plan_batch > 0) {
            cfg.plan.batch = plan_batch;
        }
        if (plan_seed >= 0) {
            cfg.plan.seed = static_cast<std::uint64_t>(plan_seed);
        }

        const Checkpoint dck = load_checkpoint(plan_denoiser);
        const Checkpoint vck = load_checkpoint(plan_value);
        require_compatible_or_refuse(dck, vck, plan_denoiser, plan_value);
        auto denoiser = make_denoiser(dck);
        auto value = make_value_net(vck);

        PlanConfig pc;
        pc.alpha = cfg.plan.alpha;
        pc.batch = cfg.plan.batch;
        pc.seed = cfg.plan.seed;
        pc.grad_clip = cfg.plan.grad_clip;
        pc.initial_state = initial_state_from_dataset(plan_init_from, plan_init_index);

        const PlanResult result = plan(*denoiser, *value, dck.schedule, dck.stats, pc);

        const std::string out_path = resolve_out(plan_out, "plan.bin");
        ensure_parent(out_path);
        nlohmann::json config_echo = cfg.to_json();
        config_echo["plan"]["resolved_alpha"] = pc.alpha;
        config_echo["plan"]["resolved_seed"] = pc.seed;
        config_echo["plan"]["horizon"] = dck.arch.horizon;
        config_echo["plan"]["diffusion_steps"] = dck.schedule.steps;
        write_plan_file(out_path, result, config_echo,
                        checkpoint_provenance(plan_denoiser, plan_value));
        double avg = 0.0;
        for (double r : result.predicted_returns) {
            avg += r;
        }
        avg /= static_cast<double>(result.predicted_returns.size());
        std::printf("plan %s: batch %d, alpha %.4g, mean predicted return %.4f", out_path.c_str(),
                    pc.batch, pc.alpha, avg);
        if (result.clip_events > 0) {
            std::printf(" (gradient clipped %d times at %.4g)", result.clip_events, pc.grad_clip);
        }
        std::printf("\n");
    });

    // --- rollout -----------------------------------------------------------
    auto* roll_cmd = app.add_subcommand("rollout", "Adversarial rollout against a heuristic "
                                                   "defense");
    std::string roll_denoiser, roll_value, roll_out, roll_init_from, roll_policy;
    CommonOpts roll_common;
    int roll_m = -1, roll_total = -1, roll_init_index = 0;
    std::int64_t roll_seed = -1;
    double roll_alpha = -1.0;
    roll_cmd->add_option("--denoiser", roll_denoiser, "Denoiser checkpoint")->required();
    roll_cmd->add_option("--value", roll_value, "Value checkpoint")->required();
    roll_cmd->add_option("--out", roll_out, "Rollout output file");
    roll_cmd->add_option("--config", roll_common.config_path, "Config file");
    roll_cmd->add_option("--policy", roll_policy, "man_to_man | zone_2_3");
    roll_cmd->add_option("--m", roll_m, "Frames per planning segment");
    roll_cmd->add_option("--total", roll_total, "Total rollout frames");
    roll_cmd->add_option("--seed", roll_seed, "Rollout seed");
    roll_cmd->add_option("--alpha", roll_alpha, "Guidance scale");
    roll_cmd->add_option("--init-from", roll_init_from, "Dataset dir for the initial state")
        ->required();
    roll_cmd->add_option("--init-index", roll_init_index, "Example index for the initial state");
    roll_cmd->callback([&]() {
        RunConfig cfg = load_config(roll_common);
        if (!roll_policy.empty()) {
            cfg.adversary.policy = roll_policy;
        }
        if (roll_m > 0) {
            cfg.adversary.m = roll_m;
        }
        if (roll_total > 0) {
            cfg.adversary.total_len = roll_total;
        }
        if (roll_seed >= 0) {
            cfg.plan.seed = static_cast<std::uint64_t>(roll_seed);
        }
        if (roll_alpha >= 0.0) {
            cfg.plan.alpha = roll_alpha;
        }

        const Checkpoint dck = load_checkpoint(roll_denoiser);
        const Checkpoint vck = load_checkpoint(roll_value);
        require_compatible_or_refuse(dck, vck, roll_denoiser, roll_value);
        auto denoiser = make_denoiser(dck);
        auto value = make_value_net(vck);

        CourtSpec court;
        AdversarialConfig adv;
        adv.segment_len = cfg.adversary.m;
        adv.total_len = cfg.adversary.total_len;
        adv.policy.kind = defense_kind_from_name(cfg.adversary.policy);
        adv.policy.max_speed_ftps = cfg.adversary.max_speed_ftps;
        const Vec2 basket{court.basket_positions[1].x, court.basket_positions[1].y};
        adv.policy.zone_anchors = default_zone_anchors(court, basket);

        PlanConfig pc;
        pc.alpha = cfg.plan.alpha;
        pc.seed = cfg.plan.seed;
        pc.grad_clip = cfg.plan.grad_clip;
        pc.batch = 1;

        const auto state = initial_state_from_dataset(roll_init_from, roll_init_index);
        const Frame initial = frame_from_state(state);
        const RolloutResult result = adversarial_rollout(*denoiser, *value, dck.schedule,
                                                         dck.stats, court, adv, pc, initial,
                                                         /*offense_team_id=*/1, basket);

        const std::string out_path = resolve_out(roll_out, "rollout.bin");
        ensure_parent(out_path);
        PlanResult as_plan;
        as_plan.trajectories.push_back(result.trajectory);
        as_plan.predicted_returns.push_back(result.predicted_return);
        nlohmann::json config_echo = cfg.to_json();
        config_echo["adversary"]["resolved_policy"] = cfg.adversary.policy;
        config_echo["adversary"]["resolved_m"] = adv.segment_len;
        config_echo["adversary"]["segments"] = result.segments;
        write_plan_file(out_path, as_plan, config_echo,
                        checkpoint_provenance(roll_denoiser, roll_value));
        std::printf("rollout %s: policy %s, m %d, segments %d, predicted return %.4f\n",
                    out_path.c_str(), cfg.adversary.policy.c_str(), adv.segment_len,
                    result.segments, result.predicted_return);
    });

    // --- evaluate -----------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("evaluate", "Alpha sweep with AVG/MAX return reports");
    std::string eval_denoiser, eval_value, eval_data, eval_prefix, eval_alphas;
    CommonOpts eval_common;
    int eval_runs = -1, eval_batch = -1;
    std::int64_t eval_seed = -1;
    eval_cmd->add_option("--denoiser", eval_denoiser, "Denoiser checkpoint")->required();
    eval_cmd->add_option("--value", eval_value, "Value checkpoint")->required();
    eval_cmd->add_option("--data", eval_data, "Dataset dir (initial states)")->required();
    eval_cmd->add_option("--out-prefix", eval_prefix, "Report prefix");
    eval_cmd->add_option("--config", eval_common.config_path, "Config file");
    eval_cmd->add_option("--alphas", eval_alphas, "Comma-separated alpha list");
    eval_cmd->add_option("--runs", eval_runs, "Seeded runs per alpha");
    eval_cmd->add_option("--batch", eval_batch, "Trajectories per run");
    eval_cmd->add_option("--seed", eval_seed, "Base seed");
    eval_cmd->callback([&]() {
        RunConfig cfg = load_config(eval_common);
        if (!eval_alphas.empty()) {
            cfg.eval.alphas.clear();
            std::stringstream ss(eval_alphas);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                cfg.eval.alphas.push_back(std::stod(cell));
            }
        }
        if (eval_runs > 0) {
            cfg.eval.runs = eval_runs;
        }
        if (eval_batch > 0) {
            cfg.eval.batch = eval_batch;
        }
        if (eval_seed >= 0) {
            cfg.eval.seed = static_cast<std::uint64_t>(eval_seed);
        }

        const Checkpoint dck = load_checkpoint(eval_denoiser);
        const Checkpoint vck = load_checkpoint(eval_value);
        require_compatible_or_refuse(dck, vck, eval_denoiser, eval_value);
        auto denoiser = make_denoiser(dck);
        auto value = make_value_net(vck);
        const Dataset ds = load_dataset(eval_data);

        SweepConfig sweep_cfg;
        sweep_cfg.alphas = cfg.eval.alphas;
        sweep_cfg.runs = cfg.eval.runs;
        sweep_cfg.batch = cfg.eval.batch;
        sweep_cfg.seed = cfg.eval.seed;
        sweep_cfg.grad_clip = cfg.plan.grad_clip;

        CourtSpec court;
        const SweepResult sweep =
            run_alpha_sweep(*denoiser, *value, dck.schedule, dck.stats, court, ds, sweep_cfg);

        const std::string prefix = resolve_out(eval_prefix, "eval");
        ensure_parent(prefix);
        write_eval_csv(prefix + ".csv", sweep);
        nlohmann::json echo = cfg.to_json();
        echo["provenance"] = checkpoint_provenance(eval_denoiser, eval_value);
        write_eval_summary(prefix + ".summary.json", sweep, echo);

        std::printf("%-10s %-12s %-12s %-10s\n", "alpha", "AVG", "MAX", "oob_rate");
        for (std::size_t a = 0; a < sweep.alphas.size(); ++a) {
            std::printf("%-10.4g %-12.4f %-12.4f %-10.4f\n", sweep.alphas[a],
                        sweep.reports[a].avg, sweep.reports[a].max,
                        sweep.reports[a].out_of_bounds_rate);
        }
    });

    // --- render -------------------------------------------------------------
    auto* render_cmd = app.add_subcommand("render", "Draw a possession from a plan file as SVG");
    std::string render_plan, render_out;
    int render_index = 0, render_highlight = -1;
    render_cmd->add_option("--plan", render_plan, "Plan/rollout file")->required();
    render_cmd->add_option("--index", render_index, "Trajectory index in the file");
    render_cmd->add_option("--out", render_out, "SVG output path");
    render_cmd->add_option("--highlight", render_highlight, "Player object index to highlight");
    render_cmd->callback([&]() {
        const Container c = load_container(render_plan);
        if (c.header.value("kind", std::string{}) != "plan") {
            throw DataError("not a plan file: " + render_plan);
        }
        const auto& blob = c.array("trajectories");
        if (blob.shape.size() != 3 || blob.shape[2] != kFeatureDim) {
            throw DataError("plan file has unexpected trajectory shape");
        }
        const auto batch = blob.shape[0];
        if (render_index < 0 || render_index >= batch) {
            throw DataError("trajectory index out of range (batch " + std::to_string(batch) + ")");
        }
        const int horizon = static_cast<int>(blob.shape[1]);
        TrajectoryTensor traj = TrajectoryTensor::zeros(horizon);
        traj.valid_len = horizon;
        const std::size_t per = static_cast<std::size_t>(horizon) * kFeatureDim;
        traj.values.assign(blob.data.begin() + static_cast<std::ptrdiff_t>(render_index * per),
                           blob.data.begin() + static_cast<std::ptrdiff_t>((render_index + 1) * per));

        RenderStyle style;
        if (render_highlight >= 0) {
            style.highlight_player_idx = render_highlight;
        }
        CourtSpec court;
        const std::string out_path = resolve_out(render_out, "possession.svg");
        ensure_parent(out_path);
        render_possession(traj, court, style, out_path);
        std::printf("rendered %s (trajectory %d of %lld)\n", out_path.c_str(), render_index,
                    static_cast<long long>(batch));
    });

    // --- verify -------------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "Recompute artifact provenance fingerprints");
    std::vector<std::string> verify_paths;
    verify_cmd->add_option("paths", verify_paths, "Artifacts to verify")->required();
    verify_cmd->callback([&]() {
        for (const auto& path : verify_paths) {
            const Container c = load_container(path);
            const std::string kind = c.header.value("kind", std::string{"unknown"});
            std::printf("%s: kind=%s fingerprint=%s\n", path.c_str(), kind.c_str(),
                        fingerprint_hex(file_fingerprint(path)).c_str());
            if (!c.header.contains("provenance")) {
                if (kind == "plan") {
                    throw DataError("plan artifact missing provenance: " + path);
                }
                continue;
            }
            for (const auto& [role, entry] : c.header.at("provenance").items()) {
                const std::string ckpt_path = entry.at("path").get<std::string>();
                const std::string recorded = entry.at("fingerprint").get<std::string>();
                const std::string actual = fingerprint_hex(file_fingerprint(ckpt_path));
                if (recorded != actual) {
                    throw DataError("provenance mismatch for " + role + " checkpoint " + ckpt_path +
                                    ": recorded " + recorded + ", actual " + actual);
                }
                std::printf("  %s %s OK (%s)\n", role.c_str(), ckpt_path.c_str(), actual.c_str());
            }
            if (!c.header.contains("config")) {
                throw DataError("artifact missing config echo: " + path);
            }
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric abort: %s\n", e.what());
        return 3;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
