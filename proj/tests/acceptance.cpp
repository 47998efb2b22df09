// Acceptance suite. Each criterion prints one PASS/FAIL line with the
// measured values; the process exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/experiment.hpp"
#include "core/finite_diff.hpp"
#include "core/trainer.hpp"

using namespace pcs;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void zero_biases(ModelParams& params) {
    for (LayerParams& lp : params.layers) {
        lp.bq.fill(0.0);
        lp.bk.fill(0.0);
        lp.bv.fill(0.0);
        lp.bo.fill(0.0);
        lp.b1.fill(0.0);
        lp.b2.fill(0.0);
    }
    params.bc.fill(0.0);
}

// ---------------------------------------------------------------------------
// 1. LRP conservation on random bias-free models.
void criterion_conservation() {
    const auto start = std::chrono::steady_clock::now();
    RngStream master(101);
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        RngStream rng = master.split("trial", trial);
        ModelConfig cfg;
        cfg.vocab_size = 12 + rng.index(20);
        cfg.embed_dim = 8 + 4 * rng.index(7);  // 8..32
        cfg.num_heads = 2;
        cfg.num_layers = 1 + rng.index(2);
        cfg.mlp_hidden = 8 + rng.index(24);
        cfg.num_classes = 2 + rng.index(3);
        cfg.max_seq_len = 16;
        cfg.dropout_rate = 0.0;
        ModelParams params = init_params(cfg, rng);
        zero_biases(params);
        std::vector<int> tokens;
        const std::size_t len = 2 + rng.index(7);
        for (std::size_t i = 0; i < len; ++i)
            tokens.push_back(static_cast<int>(rng.index(cfg.vocab_size)));
        const ForwardTrace trace = forward(params, tokens, false, nullptr);
        const std::size_t cls = rng.index(cfg.num_classes);
        const LrpResult lrp = lrp_relevance(params, trace, cls, 1e-9);
        double total = 0.0;
        for (double v : lrp.token_relevance.data()) total += v;
        const double f_c = trace.probs[cls];
        const double rel = std::fabs(total - f_c) / f_c;
        worst = std::max(worst, rel);
        if (rel > 1e-3) ok = false;
    }
    const double elapsed = seconds_since(start);
    ok = ok && elapsed < 30.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "worst relative deviation %.3e over 50 models, %.2fs",
                  worst, elapsed);
    report(1, "LRP conservation, bias-free, plain sum", ok, detail);
}

// ---------------------------------------------------------------------------
// 2. Backprop vs central finite differences.
void criterion_gradients() {
    const auto start = std::chrono::steady_clock::now();
    RngStream master(202);
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rng = master.split("pair", trial);
        ModelConfig cfg;
        cfg.vocab_size = 10;
        cfg.embed_dim = trial % 3 == 2 ? 16 : 8;
        cfg.num_heads = 2;
        cfg.num_layers = trial % 3 == 2 ? 2 : 1;
        cfg.mlp_hidden = 12;
        cfg.num_classes = 3;
        cfg.max_seq_len = 8;
        cfg.dropout_rate = 0.0;
        ModelParams params = init_params(cfg, rng);
        std::vector<TokenizedExample> batch(1);
        for (int t = 0; t < 3; ++t)
            batch[0].tokens.push_back(static_cast<int>(rng.index(cfg.vocab_size)));
        batch[0].label = static_cast<int>(rng.index(cfg.num_classes));

        const LossResult res = loss_and_gradients(params, batch, nullptr, false);
        auto tensors = params.tensors();
        const auto fd = finite_difference_gradient(
            [&params, &batch] { return batch_loss(params, batch); }, tensors, 1e-5);
        const auto analytic = res.grads.tensors();
        for (std::size_t t = 0; t < fd.size() && ok; ++t) {
            for (std::size_t i = 0; i < fd[t].size(); ++i) {
                const double a = analytic[t]->data()[i];
                const double b = fd[t].data()[i];
                const double diff = std::fabs(a - b);
                if (diff <= 1e-9) continue;  // zero-gradient guard
                const double rel = diff / std::max(std::fabs(a), std::fabs(b));
                worst = std::max(worst, rel);
                if (rel > 1e-4) {
                    ok = false;
                    break;
                }
            }
        }
    }
    const double elapsed = seconds_since(start);
    ok = ok && elapsed < 60.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "worst relative error %.3e over 20 pairs, %.2fs", worst,
                  elapsed);
    report(2, "backprop matches central finite differences", ok, detail);
}

// ---------------------------------------------------------------------------
// 3. Hand-derived epsilon-rule cases.
void criterion_hand_lrp() {
    bool ok = true;
    double worst = 0.0;
    auto check = [&ok, &worst](const std::vector<double>& got, const std::vector<double>& want) {
        for (std::size_t i = 0; i < want.size(); ++i) {
            const double err = std::fabs(got[i] - want[i]);
            worst = std::max(worst, err);
            if (err > 1e-9) ok = false;
        }
    };

    // Identity layer: x=[1,2], W=I, b=0, r_out=[3,4] -> r_in=[3,4].
    {
        const std::vector<double> x = {1.0, 2.0};
        const auto r = lrp_linear(x, Matrix::identity(2), x, std::vector<double>{3.0, 4.0}, 1e-12);
        check(r, {3.0, 4.0});
    }
    // Two-layer case A: x=[2,1], W1=[[1,0],[0,2]], W2=[[3,1],[1,1]],
    // r_out=[1,1]. z1=[2,2], z2=[8,4]; hand evaluation gives [1.25, 0.75].
    {
        const std::vector<double> x = {2.0, 1.0};
        const Matrix w1 = Matrix::from_rows({{1, 0}, {0, 2}});
        const Matrix w2 = Matrix::from_rows({{3, 1}, {1, 1}});
        const std::vector<double> z1 = {2.0, 2.0};
        const std::vector<double> z2 = {8.0, 4.0};
        const auto r1 = lrp_linear(z1, w2, z2, std::vector<double>{1.0, 1.0}, 1e-12);
        check(r1, {1.25, 0.75});
        const auto r0 = lrp_linear(x, w1, z1, r1, 1e-12);
        check(r0, {1.25, 0.75});
    }
    // Two-layer case B with negative contributions: x=[1,-1],
    // W1=[[2,1],[1,-1]], W2=[[1,2],[2,2]], r_out=[5,6]. z1=[1,2], z2=[5,6];
    // hand evaluation gives intermediate [3,8] and input [10,1].
    {
        const std::vector<double> x = {1.0, -1.0};
        const Matrix w1 = Matrix::from_rows({{2, 1}, {1, -1}});
        const Matrix w2 = Matrix::from_rows({{1, 2}, {2, 2}});
        const std::vector<double> z1 = {1.0, 2.0};
        const std::vector<double> z2 = {5.0, 6.0};
        const auto r1 = lrp_linear(z1, w2, z2, std::vector<double>{5.0, 6.0}, 1e-12);
        check(r1, {3.0, 8.0});
        const auto r0 = lrp_linear(x, w1, z1, r1, 1e-12);
        check(r0, {10.0, 1.0});
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "worst absolute error %.3e (tolerance 1e-9)", worst);
    report(3, "hand-derived epsilon-rule propagation", ok, detail);
}

// ---------------------------------------------------------------------------
// 4. Replay distribution exactness and sampling.
void criterion_replay() {
    bool ok = true;
    double worst = 0.0;
    for (std::size_t k = 1; k <= 64; ++k) {
        const auto probs = replay_distribution(k);
        // Independent oracle: direct e^{i-k} normalization, no shifting.
        double denom = 0.0;
        for (std::size_t i = 1; i <= k; ++i)
            denom += std::exp(static_cast<double>(i) - static_cast<double>(k));
        for (std::size_t i = 1; i <= k; ++i) {
            const double expect =
                std::exp(static_cast<double>(i) - static_cast<double>(k)) / denom;
            const double err = std::fabs(probs[i - 1] - expect);
            worst = std::max(worst, err);
            if (err > 1e-12) ok = false;
        }
    }

    CurriculumConfig cfg;
    cfg.delta = 0.5;
    CurriculumState state = make_state(cfg);
    state.stage = 3;
    RngStream rng(404);
    const std::size_t draws = 10000;
    std::vector<std::size_t> counts(3, 0);
    for (std::size_t i = 0; i < draws; ++i) ++counts[sample_stage(state, cfg, rng) - 1];
    const std::vector<double> expected = {0.0900, 0.2447, 0.6652};
    std::string freq_detail;
    for (std::size_t i = 0; i < 3; ++i) {
        const double freq = static_cast<double>(counts[i]) / static_cast<double>(draws);
        const double sigma = std::sqrt(expected[i] * (1.0 - expected[i]) /
                                       static_cast<double>(draws));
        if (std::fabs(freq - expected[i]) > 3.0 * sigma) ok = false;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f ", freq);
        freq_detail += buf;
    }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "worst oracle gap %.3e over k=1..64; k=3 frequencies %s", worst,
                  freq_detail.c_str());
    report(4, "replay distribution matches the softmax oracle", ok, detail);
}

// ---------------------------------------------------------------------------
// 5. Code-switcher laws over randomized triples.
void criterion_switch_laws() {
    RngStream master(505);
    bool ok = true;
    std::size_t checked = 0;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        RngStream rng = master.split("triple", trial);
        const std::size_t len = 1 + rng.index(14);
        LabeledExample ex;
        ex.label = static_cast<int>(rng.index(5));
        RelevanceProfile profile;
        SwitchPolicy policy;
        policy.target_langs = {"de", "fr"};
        BilingualLexicon de, fr;
        de.src_lang = fr.src_lang = "en";
        de.tgt_lang = "de";
        fr.tgt_lang = "fr";
        for (std::size_t i = 0; i < len; ++i) {
            const std::string word = "w" + std::to_string(rng.index(40));
            ex.sentence.tokens.push_back(word);
            ex.sentence.langs.push_back("en");
            profile.scores.push_back(rng.uniform(-3.0, 3.0));
            if (rng.uniform() < 0.7) de.add(word, word + "_de");
            if (rng.uniform() < 0.4) {
                fr.add(word, word + "_fr");
                if (rng.uniform() < 0.3) fr.add(word, word + "_fr2");
            }
        }
        policy.lexicons.emplace("de", std::move(de));
        policy.lexicons.emplace("fr", std::move(fr));

        double tau1 = rng.uniform(), tau2 = rng.uniform();
        if (tau1 > tau2) std::swap(tau1, tau2);
        const auto eligible = eligible_indices(ex, policy);

        auto run = [&](double tau, const char* label) {
            SwitchPolicy p = policy;
            p.temperature = tau;
            RngStream r = rng.split(label);
            return switch_example(ex, profile, p, r);
        };
        const SwitchedExample s1 = run(tau1, "lo");
        const SwitchedExample s2 = run(tau2, "hi");
        const SwitchedExample s_zero = run(0.0, "zero");
        const SwitchedExample s_full = run(1.0, "full");

        // Label preservation.
        if (s1.label != ex.label || s2.label != ex.label) ok = false;
        // Count law: round-half-up of tau * |eligible|.
        auto count_law = [&](double tau, std::size_t got) {
            const std::size_t expect = std::min(
                static_cast<std::size_t>(
                    std::floor(tau * static_cast<double>(eligible.size()) + 0.5)),
                eligible.size());
            return got == expect;
        };
        if (!count_law(tau1, s1.replaced.size()) || !count_law(tau2, s2.replaced.size()))
            ok = false;
        // Prefix nesting.
        const std::set<std::size_t> low(s1.replaced.begin(), s1.replaced.end());
        const std::set<std::size_t> high(s2.replaced.begin(), s2.replaced.end());
        for (std::size_t idx : low)
            if (!high.count(idx)) ok = false;
        // tau = 0 identity.
        if (s_zero.sentence.tokens != ex.sentence.tokens || !s_zero.replaced.empty()) ok = false;
        // tau = 1 replaces exactly the eligible set.
        if (s_full.replaced != eligible) ok = false;
        for (std::size_t i = 0; i < len && ok; ++i) {
            const bool replaced = high.count(i) > 0;
            if (!replaced && s2.sentence.tokens[i] != ex.sentence.tokens[i]) ok = false;
        }
        ++checked;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "%zu randomized triples checked", checked);
    report(5, "code-switcher laws (labels, counts, nesting, extremes)", ok, detail);
}

// ---------------------------------------------------------------------------
// 6. Temperature schedule exactness.
void criterion_schedule() {
    bool ok = true;
    CurriculumConfig cfg;
    cfg.delta = 0.1;
    if (cfg.num_stages() != 11) ok = false;
    for (std::size_t k = 1; k <= 11; ++k) {
        const double expect = k == 11 ? 1.0 : static_cast<double>(k - 1) * 0.1;
        if (stage_temperature(k, cfg) != expect) ok = false;
    }
    CurriculumConfig anti = cfg;
    anti.mode = CurriculumMode::AntiCl;
    for (std::size_t k = 1; k <= 11; ++k)
        if (stage_temperature(k, anti) != stage_temperature(12 - k, cfg)) ok = false;
    report(6, "temperature ladder 0.0..1.0 and its reverse", ok,
           "delta=0.1, stages 1..11, bitwise reverse equality");
}

// ---------------------------------------------------------------------------
// 7-10. The synthetic transfer experiment and its derived checks.
struct ExperimentOutputs {
    fs::path task_dir;
    fs::path out_a;
    fs::path out_b;
    std::map<std::string, std::vector<std::vector<MetricsRow>>> metrics;  // mode -> per seed
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    double elapsed_first_run = 0.0;
};

ExperimentConfig experiment_config(const fs::path& task_dir, const fs::path& out_dir) {
    ExperimentConfig cfg;
    cfg.set("task_dir", task_dir.string());
    cfg.set("out_dir", out_dir.string());
    cfg.set("seeds", "1,2,3");
    cfg.set("train.batch_size", "16");
    cfg.set("train.encoder_lr", "2e-3");
    cfg.set("train.head_lr", "5e-3");
    cfg.set("train.eval_interval", "30");
    cfg.set("train.max_steps", "2500");
    cfg.set("curriculum.delta", "0.2");
    cfg.set("curriculum.patience0", "2");
    cfg.set("curriculum.patience_step", "1");
    cfg.set("curriculum.min_delta", "1e-3");
    cfg.set("curriculum.max_stage_steps", "90");
    return cfg;
}

ExperimentOutputs run_experiment() {
    ExperimentOutputs outputs;
    const fs::path base = fs::current_path() / "acceptance_out";
    fs::remove_all(base);
    outputs.task_dir = base / "task";
    outputs.out_a = base / "run_a";
    outputs.out_b = base / "run_b";

    ExperimentConfig synth;
    synth.set("out_dir", outputs.task_dir.string());
    synth.set("seed", "1");
    synth.set("synth.num_languages", "3");
    synth.set("synth.vocab_per_lang", "40");
    synth.set("synth.num_train", "2000");
    synth.set("synth.num_dev", "300");
    synth.set("synth.num_test", "300");
    synth.set("synth.num_classes", "2");
    synth.set("synth.p_poly", "0.1");
    synth.set("synth.p_noise", "0.5");
    run_synth(synth);

    const auto start = std::chrono::steady_clock::now();
    run_ablate(experiment_config(outputs.task_dir, outputs.out_a));
    outputs.elapsed_first_run = seconds_since(start);

    for (TrainMode mode : all_train_modes()) {
        auto& per_seed = outputs.metrics[to_string(mode)];
        for (std::uint64_t seed : outputs.seeds) {
            const fs::path metrics_path = outputs.out_a / to_string(mode) /
                                          ("seed_" + std::to_string(seed)) / "metrics.csv";
            per_seed.push_back(load_metrics_csv(metrics_path.string()));
        }
    }
    return outputs;
}

double final_mean(const std::vector<std::vector<MetricsRow>>& runs) {
    double sum = 0.0;
    for (const auto& run : runs) sum += run.back().mean_target_accuracy;
    return sum / static_cast<double>(runs.size());
}

void criterion_transfer(const ExperimentOutputs& outputs) {
    const double no_cs = final_mean(outputs.metrics.at("no_cs"));
    const double pcs = final_mean(outputs.metrics.at("pcs"));
    const double no_cl = final_mean(outputs.metrics.at("no_cl"));

    const bool a = no_cs <= 0.60;
    const bool b = pcs >= 0.85;
    const bool c1 = pcs >= no_cl - 0.02;

    // Directional learning-curve check: the mean pcs curve must reach the
    // random-CS model's final accuracy within the steps random CS consumed.
    std::size_t no_cl_steps = 0;
    for (const auto& run : outputs.metrics.at("no_cl"))
        no_cl_steps = std::max(no_cl_steps, run.back().step);
    const auto pcs_curve = aggregate_curves(outputs.metrics.at("pcs"));
    std::size_t crossing = 0;
    for (const CurvePoint& p : pcs_curve) {
        if (p.mean >= no_cl) {
            crossing = p.step;
            break;
        }
    }
    const bool c2 = crossing > 0 && crossing <= no_cl_steps;

    bool d = true;
    const std::size_t schema_columns =
        outputs.metrics.at("pcs").front().back().test_accuracy.size();
    for (TrainMode mode : all_train_modes()) {
        const auto& runs = outputs.metrics.at(to_string(mode));
        if (runs.size() != outputs.seeds.size()) d = false;
        for (const auto& run : runs) {
            if (run.empty()) d = false;
            // Comparable schema: same per-language accuracy columns.
            if (!run.empty() && run.back().test_accuracy.size() != schema_columns) d = false;
        }
    }
    const bool runtime_ok = outputs.elapsed_first_run < 600.0;

    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "no_cs=%.3f pcs=%.3f no_cl=%.3f crossing@%zu <= no_cl steps %zu, 8 modes, %.0fs",
                  no_cs, pcs, no_cl, crossing, no_cl_steps, outputs.elapsed_first_run);
    report(7, "synthetic zero-shot transfer (a)-(d)", a && b && c1 && c2 && d && runtime_ok,
           detail);
}

void criterion_keyword_rank(const ExperimentOutputs& outputs) {
    const SynthTask synth = load_synthetic_task(outputs.task_dir.string());
    const TrainTask task = make_train_task(synth);
    ModelConfig mc;
    mc.num_classes = synth.config.num_classes;
    mc.vocab_size = task.vocab.size();
    TrainConfig tc;
    tc.encoder_lr = 2e-3;
    tc.head_lr = 5e-3;
    tc.eval_interval = 30;
    tc.max_steps = 2500;
    const auto train_enc = encode(task.train, task.vocab, mc.max_seq_len);
    const auto dev_enc = encode(task.dev, task.vocab, mc.max_seq_len);
    // Same stream derivation train_model uses, so this is the seed-1 measurer.
    const ModelParams measurer =
        pretrain_measurer(train_enc, dev_enc, mc, tc, RngStream(1).split("measurer"));

    const Dataset& source_test = task.tests.at(task.src_lang);
    const auto test_enc = encode(source_test, task.vocab, mc.max_seq_len);
    std::size_t sentences = 0, content_wins = 0;
    for (std::size_t i = 0; i < source_test.size(); ++i) {
        const auto& tokens = source_test[i].sentence.tokens;
        bool has_content = false, has_function = false;
        for (const std::string& t : tokens) {
            if (is_content_surface(t)) has_content = true;
            if (is_function_surface(t)) has_function = true;
        }
        if (!has_content || !has_function) continue;
        const RelevanceProfile profile = measure_lrp(measurer, test_enc[i], i);
        // Rank 0 = most relevant (descending scores).
        std::vector<std::size_t> order(tokens.size());
        for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&profile](std::size_t a, std::size_t b) {
            if (profile.scores[a] != profile.scores[b])
                return profile.scores[a] > profile.scores[b];
            return a < b;
        });
        std::vector<double> rank(tokens.size());
        for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<double>(r);
        double content_rank = 0.0, function_rank = 0.0;
        std::size_t n_content = 0, n_function = 0;
        for (std::size_t j = 0; j < tokens.size(); ++j) {
            if (is_content_surface(tokens[j])) {
                content_rank += rank[j];
                ++n_content;
            } else if (is_function_surface(tokens[j])) {
                function_rank += rank[j];
                ++n_function;
            }
        }
        ++sentences;
        if (content_rank / n_content < function_rank / n_function) ++content_wins;
    }
    const double fraction = static_cast<double>(content_wins) / static_cast<double>(sentences);
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "content ranked above function in %.1f%% of %zu sentences (need >= 90%%)",
                  100.0 * fraction, sentences);
    report(8, "relevance ranks label carriers above noise words", fraction >= 0.90, detail);
}

void criterion_alignment(const ExperimentOutputs& outputs) {
    const SynthTask synth = load_synthetic_task(outputs.task_dir.string());
    const TrainTask task = make_train_task(synth);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [lang, lex] : task.lexicons)
        for (const std::string& key : lex.key_order)
            for (const std::string& tgt : lex.entries.at(key)) pairs.emplace_back(key, tgt);

    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : outputs.seeds) {
        auto mean_cosine = [&](const char* mode) {
            const fs::path ckpt = outputs.out_a / mode / ("seed_" + std::to_string(seed)) /
                                  "checkpoints" / "final.ckpt";
            const ModelParams params = load_model(ckpt.string());
            const auto rows = embedding_similarity(params, task.vocab, pairs);
            double sum = 0.0;
            for (const SimilarityRow& r : rows) sum += r.cosine;
            return sum / static_cast<double>(rows.size());
        };
        const double pcs_cos = mean_cosine("pcs");
        const double no_cs_cos = mean_cosine("no_cs");
        if (!(pcs_cos > no_cs_cos)) ok = false;
        char buf[80];
        std::snprintf(buf, sizeof buf, "seed%llu: %.3f>%.3f ",
                      static_cast<unsigned long long>(seed), pcs_cos, no_cs_cos);
        detail += buf;
    }
    report(9, "dictionary-pair cosine: pcs above no_cs on all seeds", ok, detail);
}

void criterion_reproducibility(ExperimentOutputs& outputs) {
    run_ablate(experiment_config(outputs.task_dir, outputs.out_b));
    bool ok = true;
    std::size_t compared = 0;
    std::string first_diff;
    for (auto it = fs::recursive_directory_iterator(outputs.out_a);
         it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        const fs::path rel = fs::relative(it->path(), outputs.out_a);
        // Manifests echo out_dir and legitimately differ between runs.
        if (rel.filename() == "manifest.json") continue;
        const fs::path other = outputs.out_b / rel;
        std::ifstream f1(it->path(), std::ios::binary), f2(other, std::ios::binary);
        const std::string b1((std::istreambuf_iterator<char>(f1)), {});
        const std::string b2((std::istreambuf_iterator<char>(f2)), {});
        if (!f1 || !f2 || b1 != b2) {
            ok = false;
            if (first_diff.empty()) first_diff = rel.string();
        }
        ++compared;
    }
    char detail[160];
    std::snprintf(detail, sizeof detail, "%zu files compared byte-for-byte%s%s", compared,
                  ok ? "" : ", first difference: ", first_diff.c_str());
    report(10, "identical seeds reproduce every output byte-for-byte", ok, detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite (%s)\n", version_string());
    criterion_conservation();
    criterion_gradients();
    criterion_hand_lrp();
    criterion_replay();
    criterion_switch_laws();
    criterion_schedule();

    ExperimentOutputs outputs = run_experiment();
    criterion_transfer(outputs);
    criterion_keyword_rank(outputs);
    criterion_alignment(outputs);
    criterion_reproducibility(outputs);

    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
