#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "core/checkpoint.hpp"
#include "core/finite_diff.hpp"
#include "core/model.hpp"

using namespace pcs;

namespace {

ModelConfig tiny_config(std::size_t vocab = 12, std::size_t d = 8, std::size_t layers = 1,
                        std::size_t classes = 2) {
    ModelConfig cfg;
    cfg.vocab_size = vocab;
    cfg.embed_dim = d;
    cfg.num_layers = layers;
    cfg.num_heads = 2;
    cfg.mlp_hidden = 12;
    cfg.num_classes = classes;
    cfg.max_seq_len = 16;
    cfg.dropout_rate = 0.0;
    return cfg;
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

double rel_err(double a, double b) {
    const double diff = std::fabs(a - b);
    if (diff <= 1e-9) return 0.0;  // zero-gradient guard
    return diff / std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

TEST_CASE("init_params is deterministic with zero biases and sane embedding rows") {
    const ModelConfig cfg = tiny_config(20, 16, 2);
    RngStream r1(9), r2(9);
    const ModelParams a = init_params(cfg, r1);
    const ModelParams b = init_params(cfg, r2);
    CHECK(a.embedding.data() == b.embedding.data());
    CHECK(a.layers[1].w2.data() == b.layers[1].w2.data());
    CHECK(a.wc.data() == b.wc.data());

    for (const LayerParams& lp : a.layers) {
        for (double v : lp.bq.data()) CHECK(v == 0.0);
        for (double v : lp.b1.data()) CHECK(v == 0.0);
    }
    for (double v : a.bc.data()) CHECK(v == 0.0);

    // Row norms should sit near sqrt(d) * sigma = 1 for sigma = 1/sqrt(d).
    const double sigma = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
    const double expected = std::sqrt(static_cast<double>(cfg.embed_dim)) * sigma;
    for (std::size_t r = 0; r < a.embedding.rows(); ++r) {
        const double n = norm(a.embedding.row(r));
        CHECK(n >= 0.1 * expected);
        CHECK(n <= 10.0 * expected);
    }
}

TEST_CASE("forward normalizes probabilities and validates inputs") {
    const ModelConfig cfg = tiny_config();
    RngStream rng(3);
    const ModelParams params = init_params(cfg, rng);

    const std::vector<int> tokens = {2, 5, 7};
    const ForwardTrace trace = forward(params, tokens, false, nullptr);
    double sum = 0.0;
    for (double p : trace.probs) sum += p;
    CHECK(std::fabs(sum - 1.0) <= 1e-9);

    CHECK_THROWS_AS(forward(params, std::vector<int>{}, false, nullptr), DataError);
    CHECK_THROWS_AS(forward(params, std::vector<int>{100}, false, nullptr), DataError);
    CHECK_THROWS_AS(forward(params, std::vector<int>(cfg.max_seq_len + 1, 2), false, nullptr),
                    DataError);
}

TEST_CASE("single token pooling is the token's final-layer vector") {
    const ModelConfig cfg = tiny_config();
    RngStream rng(4);
    const ModelParams params = init_params(cfg, rng);
    const ForwardTrace trace = forward(params, std::vector<int>{3}, false, nullptr);
    const Matrix& x_final = trace.layers.back().x_out;
    for (std::size_t c = 0; c < cfg.embed_dim; ++c)
        CHECK(trace.pooled[c] == doctest::Approx(x_final.at(0, c)).epsilon(1e-15));
}

TEST_CASE("token permutation symmetry on an ablated model") {
    // Positions zeroed and attention forced uniform: permuting tokens must
    // leave the pooled vector unchanged.
    const ModelConfig cfg = tiny_config();
    RngStream rng(5);
    ModelParams params = init_params(cfg, rng);
    params.position.fill(0.0);
    for (LayerParams& lp : params.layers) {
        lp.wq.fill(0.0);
        lp.bq.fill(0.0);
        lp.wk.fill(0.0);
        lp.bk.fill(0.0);
    }
    const ForwardTrace a = forward(params, std::vector<int>{2, 5, 7}, false, nullptr);
    const ForwardTrace b = forward(params, std::vector<int>{7, 5, 2}, false, nullptr);
    for (std::size_t c = 0; c < cfg.embed_dim; ++c)
        CHECK(a.pooled[c] == doctest::Approx(b.pooled[c]).epsilon(1e-12));
}

TEST_CASE("eval-mode forward is bit-identical across calls") {
    const ModelConfig cfg = tiny_config();
    RngStream rng(6);
    const ModelParams params = init_params(cfg, rng);
    const std::vector<int> tokens = {1, 2, 3, 4};
    const ForwardTrace a = forward(params, tokens, false, nullptr);
    const ForwardTrace b = forward(params, tokens, false, nullptr);
    CHECK(a.logits == b.logits);
    CHECK(a.pooled == b.pooled);
    CHECK(a.layers[0].attn[0].data() == b.layers[0].attn[0].data());
}

TEST_CASE("uniform probabilities give loss ln C and batch mean handles duplicates") {
    ModelConfig cfg = tiny_config();
    cfg.num_classes = 4;
    RngStream rng(7);
    ModelParams params = init_params(cfg, rng);
    // Zero classifier makes every logit zero: uniform output.
    params.wc.fill(0.0);
    params.bc.fill(0.0);

    std::vector<TokenizedExample> batch = {{{1, 2, 3}, 2}};
    const LossResult single = loss_and_gradients(params, batch, nullptr, false);
    CHECK(single.loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    std::vector<TokenizedExample> doubled = {{{1, 2, 3}, 2}, {{1, 2, 3}, 2}};
    const LossResult dup = loss_and_gradients(params, doubled, nullptr, false);
    CHECK(dup.loss == doctest::Approx(single.loss).epsilon(1e-12));

    std::vector<TokenizedExample> bad = {{{1, 2}, 9}};
    CHECK_THROWS_AS(loss_and_gradients(params, bad, nullptr, false), DataError);
}

TEST_CASE("backprop matches central finite differences") {
    RngStream master(12345);
    for (int trial = 0; trial < 5; ++trial) {
        RngStream rng = master.split("trial", trial);
        ModelConfig cfg = tiny_config(10, 8, 1, 3);
        ModelParams params = init_params(cfg, rng);
        std::vector<TokenizedExample> batch = {
            {{static_cast<int>(rng.index(10)), static_cast<int>(rng.index(10)),
              static_cast<int>(rng.index(10))},
             static_cast<int>(rng.index(3))}};

        const LossResult res = loss_and_gradients(params, batch, nullptr, false);
        auto tensors = params.tensors();
        auto f = [&] { return batch_loss(params, batch); };
        const auto fd = finite_difference_gradient(f, tensors, 1e-5);
        const auto analytic = res.grads.tensors();
        for (std::size_t t = 0; t < fd.size(); ++t)
            for (std::size_t i = 0; i < fd[t].size(); ++i)
                CHECK(rel_err(analytic[t]->data()[i], fd[t].data()[i]) <= 1e-4);
    }
}

TEST_CASE("lrp epsilon rule on the identity layer") {
    // x = [1,2], W = I, b = 0, r_out = [3,4]  ->  r_in = [3,4]
    const std::vector<double> x = {1.0, 2.0};
    const Matrix w = Matrix::identity(2);
    const std::vector<double> z = {1.0, 2.0};
    const std::vector<double> r_out = {3.0, 4.0};
    double absorbed = 0.0;
    const auto r_in = lrp_linear(x, w, z, r_out, 1e-12, &absorbed);
    CHECK(r_in[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(r_in[1] == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(std::fabs(absorbed) <= 1e-9);
}

TEST_CASE("lrp conservation on a bias-free model") {
    RngStream master(777);
    for (int trial = 0; trial < 5; ++trial) {
        RngStream rng = master.split("conservation", trial);
        ModelConfig cfg = tiny_config(14, 16, 2);
        ModelParams params = init_params(cfg, rng);
        zero_biases(params);
        std::vector<int> tokens;
        for (int i = 0; i < 5; ++i) tokens.push_back(static_cast<int>(rng.index(14)));
        const ForwardTrace trace = forward(params, tokens, false, nullptr);
        const std::size_t cls = rng.index(cfg.num_classes);
        const LrpResult lrp = lrp_relevance(params, trace, cls, 1e-9);
        double total = 0.0;
        for (double v : lrp.token_relevance.data()) total += v;
        const double f_c = trace.probs[cls];
        CHECK(std::fabs(total - f_c) / f_c <= 1e-3);
        CHECK(std::fabs(lrp.output_relevance - f_c) == 0.0);
    }
}

TEST_CASE("lrp reports relevance absorbed by biases") {
    RngStream rng(31);
    ModelConfig cfg = tiny_config(10, 8, 1);
    ModelParams params = init_params(cfg, rng);
    // Nonzero biases absorb part of the relevance; the deficit must be
    // reported, not dropped.
    for (LayerParams& lp : params.layers) {
        lp.bv.fill(0.05);
        lp.b1.fill(0.05);
        lp.b2.fill(0.05);
        lp.bo.fill(0.05);
    }
    params.bc.fill(0.05);
    const ForwardTrace trace = forward(params, std::vector<int>{2, 3, 4}, false, nullptr);
    const LrpResult lrp = lrp_relevance(params, trace, 0, 1e-9);
    double total = 0.0;
    for (double v : lrp.token_relevance.data()) total += v;
    CHECK(total + lrp.absorbed == doctest::Approx(trace.probs[0]).epsilon(1e-6));
    CHECK(std::fabs(lrp.absorbed) > 0.0);
}

TEST_CASE("a token with zeroed embedding and position receives no relevance") {
    RngStream rng(32);
    ModelConfig cfg = tiny_config(10, 8, 2);
    ModelParams params = init_params(cfg, rng);
    zero_biases(params);
    const int dead = 6;
    for (std::size_t c = 0; c < cfg.embed_dim; ++c) params.embedding.at(dead, c) = 0.0;
    for (std::size_t c = 0; c < cfg.embed_dim; ++c) params.position.at(1, c) = 0.0;

    const std::vector<int> tokens = {2, dead, 4};
    const ForwardTrace trace = forward(params, tokens, false, nullptr);
    const LrpResult lrp = lrp_relevance(params, trace, 0, 1e-9);
    double dead_total = 0.0;
    for (std::size_t c = 0; c < cfg.embed_dim; ++c)
        dead_total += std::fabs(lrp.token_relevance.at(1, c));
    CHECK(dead_total <= 1e-6 * trace.probs[0]);
}

TEST_CASE("lrp requires an eval-mode trace") {
    ModelConfig cfg = tiny_config();
    cfg.dropout_rate = 0.2;
    RngStream rng(33);
    const ModelParams params = init_params(cfg, rng);
    RngStream drop(1);
    const ForwardTrace trace = forward(params, std::vector<int>{1, 2}, true, &drop);
    CHECK_THROWS(lrp_relevance(params, trace, 0));
}

TEST_CASE("pooled and token embeddings behave like fixed vectors") {
    const ModelConfig cfg = tiny_config();
    RngStream rng(8);
    const ModelParams params = init_params(cfg, rng);
    const std::vector<int> tokens = {2, 4, 6};
    const auto a = pooled_embedding(params, tokens);
    const auto b = pooled_embedding(params, tokens);
    CHECK(a == b);

    const auto e = token_embedding(params, 3);
    CHECK(cosine_similarity(e, e) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> neg(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) neg[i] = -e[i];
    CHECK(cosine_similarity(e, neg) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("dropout only fires in train mode and is deterministic per stream") {
    ModelConfig cfg = tiny_config();
    cfg.dropout_rate = 0.5;
    RngStream rng(9);
    const ModelParams params = init_params(cfg, rng);
    const std::vector<int> tokens = {1, 2, 3};

    RngStream d1(77), d2(77);
    const ForwardTrace t1 = forward(params, tokens, true, &d1);
    const ForwardTrace t2 = forward(params, tokens, true, &d2);
    CHECK(t1.logits == t2.logits);

    const ForwardTrace eval1 = forward(params, tokens, false, nullptr);
    const ForwardTrace eval2 = forward(params, tokens, false, nullptr);
    CHECK(eval1.logits == eval2.logits);
    CHECK_THROWS_AS(forward(params, tokens, true, nullptr), ConfigError);
}

TEST_CASE("checkpoint round trip is bit exact") {
    namespace fs = std::filesystem;
    const ModelConfig cfg = tiny_config(18, 16, 2, 3);
    RngStream rng(10);
    const ModelParams params = init_params(cfg, rng);
    const fs::path dir = fs::temp_directory_path() / "pcs_model_test";
    fs::create_directories(dir);
    const std::string p1 = (dir / "a.ckpt").string();
    const std::string p2 = (dir / "b.ckpt").string();

    save_model(params, p1);
    const ModelParams loaded = load_model(p1);
    CHECK(loaded.embedding.data() == params.embedding.data());
    CHECK(loaded.layers[1].wo.data() == params.layers[1].wo.data());
    CHECK(loaded.bc.data() == params.bc.data());
    CHECK(loaded.config.mlp_hidden == cfg.mlp_hidden);

    save_model(loaded, p2);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    const std::string bytes1((std::istreambuf_iterator<char>(f1)), {});
    const std::string bytes2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(bytes1 == bytes2);
    fs::remove_all(dir);
}
