#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "adamw.hpp"
#include "codeswitch.hpp"
#include "corpus.hpp"
#include "curriculum.hpp"
#include "model.hpp"
#include "relevance.hpp"
#include "synth.hpp"

namespace pcs {

// The eight runnable training variants. pcs is the full method; the rest are
// the ablation rows plus the source-only baseline.
enum class TrainMode { Pcs, NoCl, RatioCl, GradCl, AntiCl, TgtOnly, NoScheduler, NoCs };

TrainMode train_mode_from_string(const std::string& s);
std::string to_string(TrainMode mode);
const std::vector<TrainMode>& all_train_modes();

struct TrainConfig {
    std::size_t batch_size = 16;
    double encoder_lr = 1e-4;
    double head_lr = 1e-3;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t max_steps = 4000;
    std::size_t eval_interval = 50;
    std::size_t measurer_patience = 3;
    std::size_t measurer_max_steps = 0;  // 0: fall back to max_steps
    bool warm_start = false;             // trainee reuses measurer weights
    double no_cl_fixed_tau = -1.0;       // < 0: draw tau uniformly per regeneration
    Reduction reduction = Reduction::Sum;
    double lrp_epsilon = 1e-9;

    void validate() const;
};

struct MetricsRow {
    std::size_t step = 0;
    std::size_t stage = 1;
    double temperature = 0.0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    std::vector<std::pair<std::string, double>> test_accuracy;  // per language
    double mean_target_accuracy = 0.0;
};

// Everything one training run consumes. Vocabulary covers train/dev plus both
// lexicon columns; test sets contribute nothing, so unseen target words that
// no dictionary mentions stay UNK.
struct TrainTask {
    Dataset train;
    Dataset dev;
    std::map<std::string, Dataset> tests;
    std::map<std::string, BilingualLexicon> lexicons;
    std::string src_lang;
    std::vector<std::string> target_langs;
    Vocabulary vocab;
};

Vocabulary build_vocabulary(const Dataset& train, const Dataset& dev,
                            const std::map<std::string, BilingualLexicon>& lexicons);
TrainTask make_train_task(const SynthTask& synth);

std::vector<TokenizedExample> encode(const Dataset& dataset, const Vocabulary& vocab,
                                     std::size_t max_seq_len);

// Source-only training with early stopping on dev loss; returns the
// best-on-dev parameters, which the curriculum keeps frozen.
ModelParams pretrain_measurer(const std::vector<TokenizedExample>& train,
                              const std::vector<TokenizedExample>& dev,
                              const ModelConfig& model_config, const TrainConfig& train_config,
                              const RngStream& rng);

std::vector<RelevanceProfile> compute_profiles(const ModelParams& measurer,
                                               const std::vector<TokenizedExample>& train,
                                               MeasurerKind kind, Reduction reduction,
                                               double epsilon = 1e-9);

// Uniform random scores; the Ratio-CL difficulty stand-in.
std::vector<RelevanceProfile> random_profiles(const Dataset& train, const RngStream& rng);

struct TrainResult {
    ModelParams params;
    std::vector<MetricsRow> metrics;
    std::vector<CurriculumTraceRow> trace;
    std::size_t final_step = 0;
};

struct RunHooks {
    std::function<void(std::size_t new_stage, const ModelParams&)> on_stage_advance;
};

// The curriculum-driven fine-tuning loop. The measurer and its profiles may
// be shared across modes; when null they are computed internally for modes
// that need them. All randomness forks off RngStream(seed) with fixed labels,
// so (seed, configs) fully determine the result.
TrainResult train_model(const TrainTask& task, TrainMode mode, const ModelConfig& model_config,
                        const TrainConfig& train_config, CurriculumConfig curriculum_config,
                        std::uint64_t seed, const ModelParams* measurer = nullptr,
                        const std::vector<RelevanceProfile>* profiles = nullptr,
                        const RunHooks* hooks = nullptr);

// Argmax accuracy per language over encoded test sets.
std::map<std::string, double> evaluate(const ModelParams& params,
                                       const std::map<std::string, std::vector<TokenizedExample>>& tests);
double mean_accuracy(const std::map<std::string, double>& accuracy,
                     const std::vector<std::string>& langs);

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);
std::vector<MetricsRow> load_metrics_csv(const std::string& path);

struct SimilarityRow {
    std::string src_word;
    std::string tgt_word;
    double cosine = 0.0;
    bool src_known = true;
    bool tgt_known = true;
};

std::vector<SimilarityRow> embedding_similarity(
    const ModelParams& params, const Vocabulary& vocab,
    const std::vector<std::pair<std::string, std::string>>& pairs);
void write_similarity_csv(const std::vector<SimilarityRow>& rows, const std::string& path);

// Pooled sentence vectors with language and label columns, for external
// projection tools.
void export_embeddings(const ModelParams& params, const Vocabulary& vocab, const Dataset& data,
                       const std::string& path);

struct CurvePoint {
    std::size_t step = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

// Mean and std of mean-target-accuracy across runs at each evaluation step;
// shorter runs carry their final value forward so curves share an x-axis.
std::vector<CurvePoint> aggregate_curves(const std::vector<std::vector<MetricsRow>>& runs);
void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path);

}  // namespace pcs
