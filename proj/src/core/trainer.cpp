#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace pcs {
namespace {

std::vector<const Matrix*> const_view(const std::vector<Matrix*>& v) {
    return {v.begin(), v.end()};
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Two optimizers so the classifier head can run at its own rate.
struct Optimizers {
    AdamW encoder;
    AdamW head;

    Optimizers(ModelParams& params, const TrainConfig& cfg)
        : encoder(const_view(params.encoder_tensors()),
                  AdamWConfig{cfg.encoder_lr, cfg.weight_decay, cfg.beta1, cfg.beta2,
                              cfg.adam_epsilon}),
          head(const_view(params.head_tensors()),
               AdamWConfig{cfg.head_lr, cfg.weight_decay, cfg.beta1, cfg.beta2,
                           cfg.adam_epsilon}) {}

    void step(ModelParams& params, ModelParams& grads) {
        auto enc_params = params.encoder_tensors();
        auto head_params = params.head_tensors();
        encoder.step(enc_params, const_view(grads.encoder_tensors()));
        head.step(head_params, const_view(grads.head_tensors()));
    }
};

int predict(const ModelParams& params, const TokenizedExample& ex) {
    ForwardTrace trace = forward(params, ex.tokens, false, nullptr);
    return static_cast<int>(
        std::max_element(trace.probs.begin(), trace.probs.end()) - trace.probs.begin());
}

}  // namespace

TrainMode train_mode_from_string(const std::string& s) {
    if (s == "pcs") return TrainMode::Pcs;
    if (s == "no_cl") return TrainMode::NoCl;
    if (s == "ratio_cl") return TrainMode::RatioCl;
    if (s == "grad_cl") return TrainMode::GradCl;
    if (s == "anti_cl") return TrainMode::AntiCl;
    if (s == "tgt_only") return TrainMode::TgtOnly;
    if (s == "no_scheduler") return TrainMode::NoScheduler;
    if (s == "no_cs") return TrainMode::NoCs;
    throw ConfigError("unknown train mode: " + s);
}

std::string to_string(TrainMode mode) {
    switch (mode) {
        case TrainMode::Pcs: return "pcs";
        case TrainMode::NoCl: return "no_cl";
        case TrainMode::RatioCl: return "ratio_cl";
        case TrainMode::GradCl: return "grad_cl";
        case TrainMode::AntiCl: return "anti_cl";
        case TrainMode::TgtOnly: return "tgt_only";
        case TrainMode::NoScheduler: return "no_scheduler";
        case TrainMode::NoCs: return "no_cs";
    }
    return "?";
}

const std::vector<TrainMode>& all_train_modes() {
    static const std::vector<TrainMode> modes = {
        TrainMode::Pcs,      TrainMode::NoCl,    TrainMode::RatioCl,
        TrainMode::GradCl,   TrainMode::AntiCl,  TrainMode::TgtOnly,
        TrainMode::NoScheduler, TrainMode::NoCs};
    return modes;
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (!(encoder_lr > 0.0) || !(head_lr > 0.0))
        throw ConfigError("train: learning rates must be positive");
    if (max_steps < 1) throw ConfigError("train: max_steps must be >= 1");
    if (eval_interval < 1) throw ConfigError("train: eval_interval must be >= 1");
    if (measurer_patience < 1) throw ConfigError("train: measurer_patience must be >= 1");
    if (no_cl_fixed_tau > 1.0) throw ConfigError("train: no_cl_fixed_tau must be <= 1");
}

Vocabulary build_vocabulary(const Dataset& train, const Dataset& dev,
                            const std::map<std::string, BilingualLexicon>& lexicons) {
    Vocabulary vocab;
    vocab.add_all(train);
    vocab.add_all(dev);
    for (const auto& [lang, lex] : lexicons) {
        for (const std::string& key : lex.key_order) {
            vocab.add(key);
            for (const std::string& tgt : lex.entries.at(key)) vocab.add(tgt);
        }
    }
    return vocab;
}

TrainTask make_train_task(const SynthTask& synth) {
    TrainTask task;
    task.train = synth.train;
    task.dev = synth.dev;
    task.tests = synth.tests;
    task.lexicons = synth.lexicons;
    task.src_lang = synth.src_lang;
    task.target_langs = synth.tgt_langs;
    task.vocab = build_vocabulary(task.train, task.dev, task.lexicons);
    return task;
}

std::vector<TokenizedExample> encode(const Dataset& dataset, const Vocabulary& vocab,
                                     std::size_t max_seq_len) {
    std::vector<TokenizedExample> out;
    out.reserve(dataset.size());
    for (const LabeledExample& ex : dataset) {
        TokenizedExample enc;
        enc.label = ex.label;
        const std::size_t n = std::min(ex.sentence.tokens.size(), max_seq_len);
        enc.tokens.reserve(n);
        for (std::size_t i = 0; i < n; ++i) enc.tokens.push_back(vocab.id_of(ex.sentence.tokens[i]));
        out.push_back(std::move(enc));
    }
    return out;
}

ModelParams pretrain_measurer(const std::vector<TokenizedExample>& train,
                              const std::vector<TokenizedExample>& dev,
                              const ModelConfig& model_config, const TrainConfig& train_config,
                              const RngStream& rng) {
    if (train.empty() || dev.empty()) throw DataError("pretrain_measurer: empty split");
    train_config.validate();
    RngStream init_rng = rng.split("init");
    RngStream step_rng = rng.split("steps");
    ModelParams params = init_params(model_config, init_rng);
    Optimizers opt(params, train_config);

    ModelParams best = params;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t bad_evals = 0;
    const std::size_t max_steps =
        train_config.measurer_max_steps ? train_config.measurer_max_steps : train_config.max_steps;

    std::vector<TokenizedExample> batch(train_config.batch_size);
    for (std::size_t step = 1; step <= max_steps; ++step) {
        for (auto& slot : batch) slot = train[step_rng.index(train.size())];
        LossResult res = loss_and_gradients(params, batch, &step_rng, true);
        if (!std::isfinite(res.loss))
            throw TrainingError("pretrain_measurer: loss diverged at step " + std::to_string(step));
        opt.step(params, res.grads);
        if (step % train_config.eval_interval == 0 || step == max_steps) {
            const double val = batch_loss(params, dev);
            if (val < best_loss) {
                best_loss = val;
                best = params;
                bad_evals = 0;
            } else if (++bad_evals >= train_config.measurer_patience) {
                break;
            }
        }
    }
    return best;
}

std::vector<RelevanceProfile> compute_profiles(const ModelParams& measurer,
                                               const std::vector<TokenizedExample>& train,
                                               MeasurerKind kind, Reduction reduction,
                                               double epsilon) {
    std::vector<RelevanceProfile> profiles;
    profiles.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        profiles.push_back(kind == MeasurerKind::Lrp
                               ? measure_lrp(measurer, train[i], i, reduction, epsilon)
                               : measure_gradient(measurer, train[i], i, reduction));
    }
    return profiles;
}

std::vector<RelevanceProfile> random_profiles(const Dataset& train, const RngStream& rng) {
    std::vector<RelevanceProfile> profiles;
    profiles.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        RngStream child = rng.split("profile", i);
        RelevanceProfile p;
        p.example_index = i;
        p.target_class = train[i].label;
        p.kind = MeasurerKind::Lrp;  // placeholder kind; scores are uniform noise
        for (std::size_t t = 0; t < train[i].sentence.tokens.size(); ++t)
            p.scores.push_back(child.uniform());
        profiles.push_back(std::move(p));
    }
    return profiles;
}

std::map<std::string, double> evaluate(
    const ModelParams& params,
    const std::map<std::string, std::vector<TokenizedExample>>& tests) {
    std::map<std::string, double> out;
    for (const auto& [lang, examples] : tests) {
        if (examples.empty()) throw DataError("evaluate: empty test set for " + lang);
        std::size_t correct = 0;
        for (const TokenizedExample& ex : examples)
            if (predict(params, ex) == ex.label) ++correct;
        out[lang] = static_cast<double>(correct) / static_cast<double>(examples.size());
    }
    return out;
}

double mean_accuracy(const std::map<std::string, double>& accuracy,
                     const std::vector<std::string>& langs) {
    if (langs.empty()) throw DataError("mean_accuracy: no languages");
    double sum = 0.0;
    for (const std::string& lang : langs) {
        auto it = accuracy.find(lang);
        if (it == accuracy.end()) throw DataError("mean_accuracy: missing language " + lang);
        sum += it->second;
    }
    return sum / static_cast<double>(langs.size());
}

namespace {

struct StageData {
    std::vector<SwitchedExample> switched;
    std::vector<TokenizedExample> encoded;
};

CurriculumMode to_curriculum_mode(TrainMode mode) {
    switch (mode) {
        case TrainMode::RatioCl: return CurriculumMode::RatioCl;
        case TrainMode::AntiCl: return CurriculumMode::AntiCl;
        case TrainMode::NoScheduler: return CurriculumMode::NoScheduler;
        case TrainMode::NoCl:
        case TrainMode::NoCs: return CurriculumMode::NoCl;
        default: return CurriculumMode::Pcs;
    }
}

bool mode_needs_measurer(TrainMode mode) {
    switch (mode) {
        case TrainMode::Pcs:
        case TrainMode::GradCl:
        case TrainMode::AntiCl:
        case TrainMode::TgtOnly:
        case TrainMode::NoScheduler: return true;
        default: return false;
    }
}

}  // namespace

TrainResult train_model(const TrainTask& task, TrainMode mode, const ModelConfig& model_config,
                        const TrainConfig& train_config, CurriculumConfig curriculum_config,
                        std::uint64_t seed, const ModelParams* measurer,
                        const std::vector<RelevanceProfile>* profiles, const RunHooks* hooks) {
    train_config.validate();
    curriculum_config.mode = to_curriculum_mode(mode);
    curriculum_config.validate();
    const bool switching = mode != TrainMode::NoCs && !task.target_langs.empty();
    if (mode != TrainMode::NoCs && task.target_langs.empty())
        throw ConfigError("train_model: mode " + to_string(mode) + " needs target languages");

    RngStream root(seed);

    ModelConfig cfg = model_config;
    cfg.vocab_size = task.vocab.size();
    cfg.validate();

    const auto train_enc = encode(task.train, task.vocab, cfg.max_seq_len);
    const auto dev_enc = encode(task.dev, task.vocab, cfg.max_seq_len);
    std::map<std::string, std::vector<TokenizedExample>> tests_enc;
    for (const auto& [lang, data] : task.tests)
        tests_enc.emplace(lang, encode(data, task.vocab, cfg.max_seq_len));
    for (const std::string& lang : task.target_langs)
        if (!tests_enc.count(lang))
            throw ConfigError("train_model: no test set for target language " + lang);

    // Frozen difficulty measurer and per-example profiles, computed once.
    ModelParams owned_measurer;
    std::vector<RelevanceProfile> owned_profiles;
    const std::vector<RelevanceProfile>* active_profiles = profiles;
    if (switching) {
        if (mode == TrainMode::RatioCl) {
            owned_profiles = random_profiles(task.train, root.split("ratio_profiles"));
            active_profiles = &owned_profiles;
        } else if (mode_needs_measurer(mode) && active_profiles == nullptr) {
            const ModelParams* frozen = measurer;
            if (frozen == nullptr) {
                owned_measurer = pretrain_measurer(train_enc, dev_enc, cfg, train_config,
                                                   root.split("measurer"));
                frozen = &owned_measurer;
            }
            const MeasurerKind kind =
                mode == TrainMode::GradCl ? MeasurerKind::Gradient : MeasurerKind::Lrp;
            owned_profiles = compute_profiles(*frozen, train_enc, kind, train_config.reduction,
                                              train_config.lrp_epsilon);
            active_profiles = &owned_profiles;
        }
        if (mode_needs_measurer(mode) && active_profiles == nullptr)
            throw ConfigError("train_model: mode needs relevance profiles");
        if (active_profiles && active_profiles->size() < task.train.size())
            throw DataError("train_model: profiles do not cover the training set");
    }

    // Trainee: fresh initialization by default; the architecture matches the
    // measurer's either way.
    RngStream init_rng = root.split("trainee_init");
    ModelParams params = init_params(cfg, init_rng);
    if (train_config.warm_start) {
        if (measurer == nullptr && owned_measurer.layers.empty())
            throw ConfigError("train_model: warm start requires a measurer");
        params = measurer ? *measurer : owned_measurer;
    }
    Optimizers opt(params, train_config);

    SwitchPolicy base_policy;
    if (switching) {
        base_policy.target_langs = mode == TrainMode::TgtOnly
                                       ? std::vector<std::string>{task.target_langs.front()}
                                       : task.target_langs;
        base_policy.single_target = mode == TrainMode::TgtOnly;
        for (const std::string& lang : base_policy.target_langs) {
            auto it = task.lexicons.find(lang);
            if (it == task.lexicons.end())
                throw ConfigError("train_model: missing lexicon for " + lang);
            base_policy.lexicons.emplace(lang, it->second);
        }
    }

    const RngStream switch_rng = root.split("switch");
    RngStream nocl_rng = root.split("no_cl");
    std::size_t regen_counter = 0;

    CurriculumState state = make_state(curriculum_config);
    std::vector<StageData> stages;  // stages[k-1] is D^(k)

    auto generate_stage = [&](std::size_t stage_id, double tau) {
        StageData data;
        if (!switching || (mode == TrainMode::NoCs)) {
            data.encoded = train_enc;
        } else {
            SwitchPolicy policy = base_policy;
            policy.temperature = tau;
            data.switched = generate_stage_dataset(task.train, *active_profiles, tau, policy,
                                                   stage_id, switch_rng);
            Dataset as_dataset;
            as_dataset.reserve(data.switched.size());
            for (const SwitchedExample& ex : data.switched)
                as_dataset.push_back({ex.sentence, ex.label});
            data.encoded = encode(as_dataset, task.vocab, cfg.max_seq_len);
        }
        return data;
    };

    auto nocl_temperature = [&]() {
        if (mode == TrainMode::NoCs) return 0.0;
        if (train_config.no_cl_fixed_tau >= 0.0) return train_config.no_cl_fixed_tau;
        return nocl_rng.uniform();
    };

    if (mode == TrainMode::NoCl) {
        state.temperature = nocl_temperature();
        owned_profiles = random_profiles(task.train, nocl_rng.split("regen", regen_counter));
        active_profiles = &owned_profiles;
        stages.push_back(generate_stage(1000 + regen_counter, state.temperature));
    } else {
        stages.push_back(generate_stage(1, state.temperature));
    }

    const std::size_t steps_per_epoch =
        std::max<std::size_t>(1, (task.train.size() + train_config.batch_size - 1) /
                                     train_config.batch_size);

    RngStream train_rng = root.split("train");
    TrainResult result;
    double running_loss = 0.0;
    std::size_t steps_since_eval = 0;
    std::map<std::size_t, std::size_t> replay_hist;
    std::vector<TokenizedExample> batch(train_config.batch_size);
    std::size_t step = 0;
    bool finished = false;

    while (step < train_config.max_steps && !finished) {
        ++step;
        const std::size_t source_stage = sample_stage(state, curriculum_config, train_rng);
        const std::vector<TokenizedExample>& pool = stages[source_stage - 1].encoded;
        for (auto& slot : batch) slot = pool[train_rng.index(pool.size())];
        LossResult res = loss_and_gradients(params, batch, &train_rng, true);
        if (!std::isfinite(res.loss))
            throw TrainingError("train_model: loss diverged at step " + std::to_string(step));
        opt.step(params, res.grads);
        running_loss += res.loss;
        ++steps_since_eval;
        ++state.steps_in_stage;
        ++replay_hist[source_stage];

        // Random-CS baseline: fresh words and a fresh temperature every epoch.
        if (mode == TrainMode::NoCl && step % steps_per_epoch == 0) {
            ++regen_counter;
            state.temperature = nocl_temperature();
            owned_profiles = random_profiles(task.train, nocl_rng.split("regen", regen_counter));
            active_profiles = &owned_profiles;
            stages[0] = generate_stage(1000 + regen_counter, state.temperature);
        }

        if (step % train_config.eval_interval != 0 && step != train_config.max_steps) continue;

        const double val_loss = batch_loss(params, dev_enc);
        const auto accuracy = evaluate(params, tests_enc);

        MetricsRow row;
        row.step = step;
        row.stage = state.stage;
        row.temperature = state.temperature;
        row.train_loss = running_loss / static_cast<double>(steps_since_eval);
        row.val_loss = val_loss;
        for (const auto& [lang, acc] : accuracy) row.test_accuracy.emplace_back(lang, acc);
        row.mean_target_accuracy = mean_accuracy(accuracy, task.target_langs);
        result.metrics.push_back(row);
        running_loss = 0.0;
        steps_since_eval = 0;

        AdvanceDecision decision = should_advance(state, val_loss, curriculum_config);
        // The cap paces intermediate stages; the terminal stage converges on
        // patience alone.
        if (decision == AdvanceDecision::Stay && curriculum_config.stage_step_cap() > 0 &&
            state.stage < curriculum_config.num_stages() &&
            state.steps_in_stage >= curriculum_config.stage_step_cap()) {
            decision = AdvanceDecision::Advance;
        }

        CurriculumTraceRow trace_row;
        trace_row.step = step;
        trace_row.stage = state.stage;
        trace_row.temperature = state.temperature;
        trace_row.val_loss = val_loss;
        trace_row.decision = to_string(decision);
        trace_row.replay_histogram.assign(state.stage, 0);
        for (const auto& [stage_idx, count] : replay_hist)
            trace_row.replay_histogram[stage_idx - 1] = count;
        result.trace.push_back(std::move(trace_row));
        replay_hist.clear();

        if (decision == AdvanceDecision::Advance) {
            advance_stage(state, curriculum_config);
            stages.push_back(generate_stage(state.stage, state.temperature));
            if (hooks && hooks->on_stage_advance) hooks->on_stage_advance(state.stage, params);
        } else if (decision == AdvanceDecision::Finish) {
            finished = true;
        }
    }

    result.params = std::move(params);
    result.final_step = step;
    return result;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write metrics: " + path);
    out << "step,stage,tau,train_loss,val_loss";
    if (!rows.empty())
        for (const auto& [lang, acc] : rows.front().test_accuracy) out << ",acc_" << lang;
    out << ",mean_target_acc\n";
    for (const MetricsRow& row : rows) {
        out << row.step << ',' << row.stage << ',' << format_double(row.temperature) << ','
            << format_double(row.train_loss) << ',' << format_double(row.val_loss);
        for (const auto& [lang, acc] : row.test_accuracy) out << ',' << format_double(acc);
        out << ',' << format_double(row.mean_target_accuracy) << "\n";
    }
    if (!out) throw IoError("failed writing metrics: " + path);
}

std::vector<MetricsRow> load_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read metrics: " + path);
    std::string header;
    if (!std::getline(in, header)) throw DataError("metrics file empty: " + path);
    std::vector<std::string> columns;
    {
        std::istringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) columns.push_back(col);
    }
    std::vector<MetricsRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != columns.size())
            throw DataError("metrics row width mismatch in " + path);
        MetricsRow row;
        row.step = std::stoull(fields[0]);
        row.stage = std::stoull(fields[1]);
        row.temperature = std::stod(fields[2]);
        row.train_loss = std::stod(fields[3]);
        row.val_loss = std::stod(fields[4]);
        for (std::size_t i = 5; i + 1 < fields.size(); ++i)
            row.test_accuracy.emplace_back(columns[i].substr(4), std::stod(fields[i]));
        row.mean_target_accuracy = std::stod(fields.back());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SimilarityRow> embedding_similarity(
    const ModelParams& params, const Vocabulary& vocab,
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<SimilarityRow> rows;
    rows.reserve(pairs.size());
    for (const auto& [src, tgt] : pairs) {
        SimilarityRow row;
        row.src_word = src;
        row.tgt_word = tgt;
        row.src_known = vocab.contains(src);
        row.tgt_known = vocab.contains(tgt);
        const auto a = token_embedding(params, vocab.id_of(src));
        const auto b = token_embedding(params, vocab.id_of(tgt));
        row.cosine = cosine_similarity(a, b);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_similarity_csv(const std::vector<SimilarityRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write similarity table: " + path);
    out << "src,tgt,cosine,src_in_vocab,tgt_in_vocab\n";
    for (const SimilarityRow& row : rows)
        out << row.src_word << ',' << row.tgt_word << ',' << format_double(row.cosine) << ','
            << (row.src_known ? 1 : 0) << ',' << (row.tgt_known ? 1 : 0) << "\n";
    if (!out) throw IoError("failed writing similarity table: " + path);
}

void export_embeddings(const ModelParams& params, const Vocabulary& vocab, const Dataset& data,
                       const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write embeddings: " + path);
    out << "lang,label";
    for (std::size_t c = 0; c < params.config.embed_dim; ++c) out << ",v" << c;
    out << "\n";
    for (const LabeledExample& ex : data) {
        TokenizedExample enc;
        enc.label = ex.label;
        for (const std::string& tok : ex.sentence.tokens) enc.tokens.push_back(vocab.id_of(tok));
        if (enc.tokens.size() > params.config.max_seq_len)
            enc.tokens.resize(params.config.max_seq_len);
        const auto pooled = pooled_embedding(params, enc.tokens);
        out << (ex.sentence.langs.empty() ? "?" : ex.sentence.langs.front()) << ',' << ex.label;
        for (double v : pooled) out << ',' << format_double(v);
        out << "\n";
    }
    if (!out) throw IoError("failed writing embeddings: " + path);
}

std::vector<CurvePoint> aggregate_curves(const std::vector<std::vector<MetricsRow>>& runs) {
    if (runs.empty()) return {};
    std::vector<std::size_t> steps;
    for (const auto& run : runs)
        for (const MetricsRow& row : run) steps.push_back(row.step);
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

    std::vector<CurvePoint> curve;
    curve.reserve(steps.size());
    for (std::size_t s : steps) {
        std::vector<double> values;
        for (const auto& run : runs) {
            double last = 0.0;
            bool seen = false;
            for (const MetricsRow& row : run) {
                if (row.step > s) break;
                last = row.mean_target_accuracy;
                seen = true;
            }
            if (seen) values.push_back(last);
        }
        if (values.empty()) continue;
        CurvePoint p;
        p.step = s;
        double sum = 0.0;
        for (double v : values) sum += v;
        p.mean = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - p.mean) * (v - p.mean);
            p.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
        curve.push_back(p);
    }
    return curve;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write curve: " + path);
    out << "step,mean_target_acc,std_target_acc\n";
    for (const CurvePoint& p : curve)
        out << p.step << ',' << format_double(p.mean) << ',' << format_double(p.stddev) << "\n";
    if (!out) throw IoError("failed writing curve: " + path);
}

}  // namespace pcs
