#include "experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "checkpoint.hpp"
#include "trainer.hpp"

namespace fs = std::filesystem;

namespace pcs {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void write_manifest(const fs::path& path, const std::map<std::string, std::string>& echo,
                    const std::string& command) {
    nlohmann::json manifest;
    manifest["version"] = version_string();
    manifest["command"] = command;
    manifest["config"] = echo;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << manifest.dump(2) << "\n";
}

ModelConfig model_config_from(const ExperimentConfig& cfg) {
    ModelConfig mc;
    mc.embed_dim = cfg.get_size("model.embed_dim");
    mc.num_layers = cfg.get_size("model.num_layers");
    mc.num_heads = cfg.get_size("model.num_heads");
    mc.mlp_hidden = cfg.get_size("model.mlp_hidden");
    mc.max_seq_len = cfg.get_size("model.max_seq_len");
    mc.dropout_rate = cfg.get_double("model.dropout");
    mc.num_classes = 0;  // filled from the task
    mc.vocab_size = 0;   // filled from the vocabulary
    return mc;
}

TrainConfig train_config_from(const ExperimentConfig& cfg) {
    TrainConfig tc;
    tc.batch_size = cfg.get_size("train.batch_size");
    tc.encoder_lr = cfg.get_double("train.encoder_lr");
    tc.head_lr = cfg.get_double("train.head_lr");
    tc.weight_decay = cfg.get_double("train.weight_decay");
    tc.max_steps = cfg.get_size("train.max_steps");
    tc.eval_interval = cfg.get_size("train.eval_interval");
    tc.measurer_patience = cfg.get_size("train.measurer_patience");
    tc.measurer_max_steps = cfg.get_size("train.measurer_max_steps");
    tc.warm_start = cfg.get_bool("train.warm_start");
    tc.no_cl_fixed_tau = cfg.get_double("train.no_cl_fixed_tau");
    tc.reduction = reduction_from_string(cfg.get("measure.reduction"));
    tc.lrp_epsilon = cfg.get_double("measure.epsilon");
    tc.validate();
    return tc;
}

CurriculumConfig curriculum_config_from(const ExperimentConfig& cfg) {
    CurriculumConfig cc;
    cc.delta = cfg.get_double("curriculum.delta");
    cc.base_patience = cfg.get_size("curriculum.patience0");
    cc.patience_step = cfg.get_size("curriculum.patience_step");
    cc.min_delta = cfg.get_double("curriculum.min_delta");
    cc.max_stage_steps = cfg.get_size("curriculum.max_stage_steps");
    cc.validate();
    return cc;
}

SynthConfig synth_config_from(const ExperimentConfig& cfg) {
    SynthConfig sc;
    sc.num_languages = cfg.get_size("synth.num_languages");
    sc.vocab_per_lang = cfg.get_size("synth.vocab_per_lang");
    sc.num_train = cfg.get_size("synth.num_train");
    sc.num_dev = cfg.get_size("synth.num_dev");
    sc.num_test = cfg.get_size("synth.num_test");
    sc.num_classes = cfg.get_size("synth.num_classes");
    sc.p_poly = cfg.get_double("synth.p_poly");
    sc.p_noise = cfg.get_double("synth.p_noise");
    sc.func_coverage = cfg.get_double("synth.func_coverage");
    return sc;
}

struct LoadedTask {
    TrainTask task;
    std::size_t num_classes = 0;
};

LoadedTask load_task(const ExperimentConfig& cfg) {
    const std::string dir = cfg.require("task_dir");
    if (!fs::exists(dir)) throw DataError("task_dir does not exist: " + dir);
    SynthTask synth = load_synthetic_task(dir, cfg.get_size("model.max_seq_len"));
    LoadedTask loaded;
    loaded.task = make_train_task(synth);
    loaded.num_classes = synth.config.num_classes;
    return loaded;
}

// Measurer + profiles for one seed, shared across ablation modes. Streams are
// split exactly as train_model splits them internally, so running a mode
// stand-alone or inside a sweep produces identical bytes.
struct SeedArtifacts {
    ModelParams measurer;
    std::vector<RelevanceProfile> lrp_profiles;
    std::vector<RelevanceProfile> grad_profiles;
    bool have_measurer = false;
};

SeedArtifacts prepare_seed_artifacts(const TrainTask& task, const ModelConfig& mc,
                                     const TrainConfig& tc, std::uint64_t seed,
                                     bool need_lrp, bool need_grad) {
    SeedArtifacts art;
    if (!need_lrp && !need_grad) return art;
    RngStream root(seed);
    ModelConfig cfg = mc;
    cfg.vocab_size = task.vocab.size();
    const auto train_enc = encode(task.train, task.vocab, cfg.max_seq_len);
    const auto dev_enc = encode(task.dev, task.vocab, cfg.max_seq_len);
    art.measurer = pretrain_measurer(train_enc, dev_enc, cfg, tc, root.split("measurer"));
    art.have_measurer = true;
    if (need_lrp)
        art.lrp_profiles = compute_profiles(art.measurer, train_enc, MeasurerKind::Lrp,
                                            tc.reduction, tc.lrp_epsilon);
    if (need_grad)
        art.grad_profiles = compute_profiles(art.measurer, train_enc, MeasurerKind::Gradient,
                                             tc.reduction, tc.lrp_epsilon);
    return art;
}

void run_one_training(const ExperimentConfig& cfg, const LoadedTask& loaded, TrainMode mode,
                      std::uint64_t seed, const SeedArtifacts& art, const fs::path& out_root,
                      std::vector<MetricsRow>* metrics_out) {
    const TrainTask& task = loaded.task;
    ModelConfig mc = model_config_from(cfg);
    mc.num_classes = loaded.num_classes;
    const TrainConfig tc = train_config_from(cfg);
    const CurriculumConfig cc = curriculum_config_from(cfg);

    const fs::path run_dir = out_root / to_string(mode) / ("seed_" + std::to_string(seed));
    fs::create_directories(run_dir / "checkpoints");

    RunHooks hooks;
    hooks.on_stage_advance = [&run_dir](std::size_t stage, const ModelParams& params) {
        char name[32];
        std::snprintf(name, sizeof name, "stage_%02zu.ckpt", stage);
        save_model(params, (run_dir / "checkpoints" / name).string());
    };

    const ModelParams* measurer = art.have_measurer ? &art.measurer : nullptr;
    const std::vector<RelevanceProfile>* profiles = nullptr;
    if (mode == TrainMode::GradCl && !art.grad_profiles.empty()) profiles = &art.grad_profiles;
    else if (!art.lrp_profiles.empty()) profiles = &art.lrp_profiles;

    TrainResult result =
        train_model(task, mode, mc, tc, cc, seed, measurer, profiles, &hooks);

    save_model(result.params, (run_dir / "checkpoints" / "final.ckpt").string());
    write_metrics_csv(result.metrics, (run_dir / "metrics.csv").string());
    save_trace(result.trace, (run_dir / "trace.jsonl").string());
    task.vocab.save((run_dir / "vocab.txt").string());
    auto echo = cfg.echo();
    echo["mode"] = to_string(mode);
    echo["seed"] = std::to_string(seed);
    write_manifest(run_dir / "manifest.json", echo, "train");

    const MetricsRow& last = result.metrics.back();
    std::cout << "[train] mode=" << to_string(mode) << " seed=" << seed
              << " steps=" << result.final_step
              << " final_mean_target_acc=" << last.mean_target_accuracy << "\n";
    if (metrics_out) *metrics_out = result.metrics;
}

void write_mode_aggregate(const fs::path& mode_dir, const std::vector<std::uint64_t>& seeds,
                          const std::vector<std::vector<MetricsRow>>& runs) {
    std::ofstream out(mode_dir / "aggregate.csv", std::ios::trunc);
    if (!out) throw IoError("cannot write aggregate: " + (mode_dir / "aggregate.csv").string());
    out << "seed,final_step,final_mean_target_acc\n";
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const MetricsRow& last = runs[i].back();
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", last.mean_target_accuracy);
        out << seeds[i] << ',' << last.step << ',' << buf << "\n";
        sum += last.mean_target_accuracy;
        sq += last.mean_target_accuracy * last.mean_target_accuracy;
    }
    const double n = static_cast<double>(runs.size());
    const double mean = sum / n;
    const double var = runs.size() > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "mean,,%.10g\nstd,,%.10g\n", mean, std::sqrt(var));
    out << buf;
    write_curve_csv(aggregate_curves(runs), (mode_dir / "curve.csv").string());
}

std::vector<std::pair<std::string, std::string>> dictionary_pairs(const TrainTask& task) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [lang, lex] : task.lexicons)
        for (const std::string& key : lex.key_order)
            for (const std::string& tgt : lex.entries.at(key)) pairs.emplace_back(key, tgt);
    return pairs;
}

Vocabulary vocabulary_for_checkpoint(const ExperimentConfig& cfg, const fs::path& ckpt) {
    if (cfg.has("vocab")) return Vocabulary::load(cfg.get("vocab"));
    // Conventional locations relative to a run directory.
    for (const fs::path& candidate :
         {ckpt.parent_path() / "vocab.txt", ckpt.parent_path().parent_path() / "vocab.txt"}) {
        if (fs::exists(candidate)) return Vocabulary::load(candidate.string());
    }
    throw ConfigError("no vocab.txt near checkpoint; pass vocab=<path>");
}

}  // namespace

const std::map<std::string, std::string>& ExperimentConfig::defaults() {
    static const std::map<std::string, std::string> kDefaults = {
        {"task_dir", ""},
        {"out_dir", ""},
        {"checkpoint", ""},
        {"vocab", ""},
        {"mode", "pcs"},
        {"modes", "pcs,no_cl,ratio_cl,grad_cl,anti_cl,tgt_only,no_scheduler,no_cs"},
        {"seed", "1"},
        {"seeds", "1,2,3"},
        {"synth.num_languages", "3"},
        {"synth.vocab_per_lang", "40"},
        {"synth.num_train", "2000"},
        {"synth.num_dev", "300"},
        {"synth.num_test", "300"},
        {"synth.num_classes", "2"},
        {"synth.p_poly", "0.1"},
        {"synth.p_noise", "0"},
        {"synth.func_coverage", "1.0"},
        {"model.embed_dim", "32"},
        {"model.num_layers", "2"},
        {"model.num_heads", "2"},
        {"model.mlp_hidden", "64"},
        {"model.max_seq_len", "128"},
        {"model.dropout", "0.1"},
        {"train.batch_size", "16"},
        {"train.encoder_lr", "1e-4"},
        {"train.head_lr", "1e-3"},
        {"train.weight_decay", "0.01"},
        {"train.max_steps", "4000"},
        {"train.eval_interval", "50"},
        {"train.measurer_patience", "3"},
        {"train.measurer_max_steps", "0"},
        {"train.warm_start", "false"},
        {"train.no_cl_fixed_tau", "-1"},
        {"curriculum.delta", "0.1"},
        {"curriculum.patience0", "2"},
        {"curriculum.patience_step", "1"},
        {"curriculum.min_delta", "1e-4"},
        {"curriculum.max_stage_steps", "0"},
        {"measure.kind", "lrp"},
        {"measure.reduction", "sum"},
        {"measure.epsilon", "1e-9"},
        {"export.kind", "all"},
        {"export.runs_dir", ""},
    };
    return kDefaults;
}

bool ExperimentConfig::known_key(const std::string& key) { return defaults().count(key) > 0; }

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (!known_key(key)) throw ConfigError("unknown config key: " + key);
    values_[key] = value;
}

void ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
        set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
}

bool ExperimentConfig::has(const std::string& key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

std::string ExperimentConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    auto def = defaults().find(key);
    if (def == defaults().end()) throw ConfigError("unknown config key: " + key);
    return def->second;
}

std::string ExperimentConfig::require(const std::string& key) const {
    const std::string v = get(key);
    if (v.empty()) throw ConfigError("missing required config key: " + key);
    return v;
}

double ExperimentConfig::get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing junk");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a number: '" + v + "'");
    }
}

std::size_t ExperimentConfig::get_size(const std::string& key) const {
    const double d = get_double(key);
    if (d < 0 || d != std::floor(d))
        throw ConfigError("config key " + key + ": not a non-negative integer");
    return static_cast<std::size_t>(d);
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key) const {
    return static_cast<std::uint64_t>(get_size(key));
}

bool ExperimentConfig::get_bool(const std::string& key) const {
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key " + key + ": not a boolean: '" + v + "'");
}

std::vector<std::string> ExperimentConfig::get_list(const std::string& key) const {
    std::vector<std::string> out;
    std::istringstream in(get(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::vector<std::uint64_t> ExperimentConfig::get_seeds() const {
    std::vector<std::uint64_t> seeds;
    for (const std::string& s : get_list("seeds")) {
        try {
            seeds.push_back(std::stoull(s));
        } catch (const std::exception&) {
            throw ConfigError("bad seed: '" + s + "'");
        }
    }
    if (seeds.empty()) throw ConfigError("no seeds given");
    return seeds;
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    std::map<std::string, std::string> out = defaults();
    for (const auto& [k, v] : values_) out[k] = v;
    return out;
}

void run_synth(const ExperimentConfig& cfg) {
    const std::string out_dir = cfg.require("out_dir");
    const SynthConfig sc = synth_config_from(cfg);
    const std::uint64_t seed = cfg.get_u64("seed");
    SynthTask task = generate_synthetic_task(sc, seed);
    write_synthetic_task(task, out_dir);
    std::cout << "[synth] wrote " << out_dir << " (languages=" << sc.num_languages
              << ", train=" << task.train.size() << ", classes=" << sc.num_classes << ")\n";
}

void run_measure(const ExperimentConfig& cfg) {
    const fs::path out_dir = cfg.require("out_dir");
    const std::uint64_t seed = cfg.get_u64("seed");
    LoadedTask loaded = load_task(cfg);
    fs::create_directories(out_dir);

    auto echo = cfg.echo();
    const fs::path manifest_path = out_dir / "manifest.json";
    const fs::path profiles_path = out_dir / "profiles.jsonl";
    if (fs::exists(manifest_path) && fs::exists(profiles_path)) {
        std::ifstream in(manifest_path);
        nlohmann::json existing;
        in >> existing;
        if (existing.value("config", nlohmann::json::object()) == nlohmann::json(echo)) {
            // Cache hit: profiles for this exact configuration already exist.
            std::cout << "[measure] cache hit, kept " << profiles_path.string() << "\n";
            return;
        }
    }

    ModelConfig mc = model_config_from(cfg);
    mc.num_classes = loaded.num_classes;
    const TrainConfig tc = train_config_from(cfg);
    const MeasurerKind kind = measurer_from_string(cfg.get("measure.kind"));
    const Reduction reduction = reduction_from_string(cfg.get("measure.reduction"));

    SeedArtifacts art;
    {
        RngStream root(seed);
        ModelConfig cfg2 = mc;
        cfg2.vocab_size = loaded.task.vocab.size();
        const auto train_enc = encode(loaded.task.train, loaded.task.vocab, cfg2.max_seq_len);
        const auto dev_enc = encode(loaded.task.dev, loaded.task.vocab, cfg2.max_seq_len);
        art.measurer = pretrain_measurer(train_enc, dev_enc, cfg2, tc, root.split("measurer"));
        const auto profiles = compute_profiles(art.measurer, train_enc, kind, reduction,
                                               cfg.get_double("measure.epsilon"));
        save_model(art.measurer, (out_dir / "measurer.ckpt").string());
        save_profiles(profiles, profiles_path.string());
        loaded.task.vocab.save((out_dir / "vocab.txt").string());
    }
    write_manifest(manifest_path, echo, "measure");
    std::cout << "[measure] wrote " << profiles_path.string() << " (kind=" << to_string(kind)
              << ")\n";
}

void run_train(const ExperimentConfig& cfg) {
    const fs::path out_dir = cfg.require("out_dir");
    const TrainMode mode = train_mode_from_string(cfg.get("mode"));
    const std::vector<std::uint64_t> seeds = cfg.get_seeds();
    LoadedTask loaded = load_task(cfg);
    fs::create_directories(out_dir);

    std::vector<std::vector<MetricsRow>> runs;
    for (std::uint64_t seed : seeds) {
        runs.emplace_back();
        run_one_training(cfg, loaded, mode, seed, SeedArtifacts{}, out_dir, &runs.back());
    }
    write_mode_aggregate(out_dir / to_string(mode), seeds, runs);
}

void run_ablate(const ExperimentConfig& cfg) {
    const fs::path out_dir = cfg.require("out_dir");
    const std::vector<std::uint64_t> seeds = cfg.get_seeds();
    std::vector<TrainMode> modes;
    for (const std::string& m : cfg.get_list("modes")) modes.push_back(train_mode_from_string(m));
    if (modes.empty()) throw ConfigError("ablate: empty mode list");
    LoadedTask loaded = load_task(cfg);
    fs::create_directories(out_dir);

    bool need_lrp = false, need_grad = false;
    for (TrainMode m : modes) {
        if (m == TrainMode::GradCl) need_grad = true;
        if (m == TrainMode::Pcs || m == TrainMode::AntiCl || m == TrainMode::TgtOnly ||
            m == TrainMode::NoScheduler)
            need_lrp = true;
    }

    ModelConfig mc = model_config_from(cfg);
    mc.num_classes = loaded.num_classes;
    const TrainConfig tc = train_config_from(cfg);

    std::map<TrainMode, std::vector<std::vector<MetricsRow>>> all_runs;
    for (std::uint64_t seed : seeds) {
        const SeedArtifacts art =
            prepare_seed_artifacts(loaded.task, mc, tc, seed, need_lrp, need_grad);
        for (TrainMode mode : modes) {
            all_runs[mode].emplace_back();
            run_one_training(cfg, loaded, mode, seed, art, out_dir, &all_runs[mode].back());
        }
    }
    for (TrainMode mode : modes)
        write_mode_aggregate(out_dir / to_string(mode), seeds, all_runs[mode]);

    std::ofstream summary(out_dir / "ablation_summary.csv", std::ios::trunc);
    if (!summary) throw IoError("cannot write ablation summary");
    summary << "mode,mean_target_acc,std_target_acc\n";
    for (TrainMode mode : modes) {
        const auto& runs = all_runs[mode];
        double sum = 0.0;
        for (const auto& run : runs) sum += run.back().mean_target_accuracy;
        const double mean = sum / static_cast<double>(runs.size());
        double ss = 0.0;
        for (const auto& run : runs) {
            const double d = run.back().mean_target_accuracy - mean;
            ss += d * d;
        }
        const double sd = runs.size() > 1 ? std::sqrt(ss / static_cast<double>(runs.size() - 1)) : 0.0;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g\n", to_string(mode).c_str(), mean, sd);
        summary << buf;
    }
    std::cout << "[ablate] wrote " << (out_dir / "ablation_summary.csv").string() << "\n";
}

void run_eval(const ExperimentConfig& cfg) {
    const fs::path ckpt = cfg.require("checkpoint");
    if (!fs::exists(ckpt)) throw DataError("checkpoint does not exist: " + ckpt.string());
    const fs::path out_dir = cfg.require("out_dir");
    LoadedTask loaded = load_task(cfg);
    fs::create_directories(out_dir);

    const ModelParams params = load_model(ckpt.string());
    const Vocabulary vocab = vocabulary_for_checkpoint(cfg, ckpt);
    std::map<std::string, std::vector<TokenizedExample>> tests_enc;
    for (const auto& [lang, data] : loaded.task.tests)
        tests_enc.emplace(lang, encode(data, vocab, params.config.max_seq_len));
    const auto accuracy = evaluate(params, tests_enc);
    const double avg = mean_accuracy(accuracy, loaded.task.target_langs);

    std::ofstream out(out_dir / "eval.csv", std::ios::trunc);
    if (!out) throw IoError("cannot write eval table");
    for (const auto& [lang, acc] : accuracy) out << lang << ',';
    out << "avg\n";
    for (const auto& [lang, acc] : accuracy) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g,", acc);
        out << buf;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g\n", avg);
    out << buf;

    auto echo = cfg.echo();
    write_manifest(out_dir / "eval_manifest.json", echo, "eval");
    std::cout << "[eval] mean_target_acc=" << avg << " over " << loaded.task.target_langs.size()
              << " target languages\n";
}

void run_export(const ExperimentConfig& cfg) {
    const std::string kind = cfg.get("export.kind");
    const fs::path out_dir = cfg.require("out_dir");
    fs::create_directories(out_dir);

    if (kind == "curves" || kind == "all") {
        if (cfg.has("export.runs_dir")) {
            const fs::path runs_dir = cfg.get("export.runs_dir");
            std::vector<std::vector<MetricsRow>> runs;
            std::vector<fs::path> run_dirs;
            for (const auto& entry : fs::directory_iterator(runs_dir))
                if (entry.is_directory() && entry.path().filename().string().rfind("seed_", 0) == 0)
                    run_dirs.push_back(entry.path());
            std::sort(run_dirs.begin(), run_dirs.end());
            for (const fs::path& dir : run_dirs) {
                const fs::path metrics = dir / "metrics.csv";
                if (fs::exists(metrics)) runs.push_back(load_metrics_csv(metrics.string()));
            }
            if (runs.empty()) throw DataError("no seed_*/metrics.csv under " + runs_dir.string());
            write_curve_csv(aggregate_curves(runs), (out_dir / "curve.csv").string());
            std::cout << "[export] wrote " << (out_dir / "curve.csv").string() << "\n";
        } else if (kind == "curves") {
            throw ConfigError("export.kind=curves requires export.runs_dir");
        }
    }

    if (kind == "similarity" || kind == "embeddings" || kind == "all") {
        const fs::path ckpt = cfg.require("checkpoint");
        if (!fs::exists(ckpt)) throw DataError("checkpoint does not exist: " + ckpt.string());
        LoadedTask loaded = load_task(cfg);
        const ModelParams params = load_model(ckpt.string());
        const Vocabulary vocab = vocabulary_for_checkpoint(cfg, ckpt);

        if (kind == "similarity" || kind == "all") {
            const auto rows = embedding_similarity(params, vocab, dictionary_pairs(loaded.task));
            write_similarity_csv(rows, (out_dir / "similarity.csv").string());
            double mean = 0.0;
            for (const SimilarityRow& r : rows) mean += r.cosine;
            if (!rows.empty()) mean /= static_cast<double>(rows.size());
            std::cout << "[export] similarity pairs=" << rows.size() << " mean_cosine=" << mean
                      << "\n";
        }
        if (kind == "embeddings" || kind == "all") {
            Dataset all;
            for (const auto& [lang, data] : loaded.task.tests)
                all.insert(all.end(), data.begin(), data.end());
            export_embeddings(params, vocab, all, (out_dir / "embeddings.csv").string());
            std::cout << "[export] wrote " << (out_dir / "embeddings.csv").string() << "\n";
        }
    }

    write_manifest(out_dir / "export_manifest.json", cfg.echo(), "export");
}

void run_command(const std::string& command, const ExperimentConfig& cfg) {
    if (command == "synth") return run_synth(cfg);
    if (command == "measure") return run_measure(cfg);
    if (command == "train") return run_train(cfg);
    if (command == "eval") return run_eval(cfg);
    if (command == "export") return run_export(cfg);
    if (command == "ablate") return run_ablate(cfg);
    throw ConfigError("unknown command: " + command);
}

}  // namespace pcs
