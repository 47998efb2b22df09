#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "rng.hpp"

namespace pcs {

struct ModelConfig {
    std::size_t vocab_size = 0;
    std::size_t embed_dim = 32;
    std::size_t num_layers = 2;
    std::size_t num_heads = 2;
    std::size_t mlp_hidden = 64;
    std::size_t num_classes = 0;
    std::size_t max_seq_len = 128;
    double dropout_rate = 0.1;

    std::size_t head_dim() const { return embed_dim / num_heads; }
    void validate() const;
};

struct LayerParams {
    Matrix wq, bq, wk, bk, wv, bv, wo, bo;  // attention projections, biases 1 x d
    Matrix w1, b1, w2, b2;                  // MLP
};

// Transformer encoder-classifier parameters. Tensor iteration order is fixed
// (embedding, position, layers in order, classifier) and shared by the
// optimizer, checkpoints and finite-difference checks.
struct ModelParams {
    ModelConfig config;
    Matrix embedding;  // vocab_size x d
    Matrix position;   // max_seq_len x d
    std::vector<LayerParams> layers;
    Matrix wc, bc;  // d x num_classes, 1 x num_classes

    void for_each_tensor(const std::function<void(const std::string&, Matrix&)>& fn);
    void for_each_tensor(const std::function<void(const std::string&, const Matrix&)>& fn) const;
    std::vector<Matrix*> tensors();
    std::vector<const Matrix*> tensors() const;
    std::vector<Matrix*> encoder_tensors();
    std::vector<Matrix*> head_tensors();
};

ModelParams init_params(const ModelConfig& config, RngStream& rng);
ModelParams zeros_like(const ModelParams& params);

struct LayerTrace {
    Matrix x_in;         // L x d, layer input
    Matrix q, k, v;      // L x d
    std::vector<Matrix> attn;  // per head, L x L row-stochastic weights
    Matrix attn_concat;  // L x d, concatenated head outputs (pre-output projection)
    Matrix attn_out;     // L x d, output projection + bias, before dropout
    Matrix attn_mask;    // dropout keep-scales; empty in eval mode
    Matrix x_mid;        // L x d, after attention residual
    Matrix mlp_pre;      // L x mlp_hidden, pre-activation
    Matrix mlp_act;      // L x mlp_hidden, ReLU output
    Matrix mlp_out;      // L x d, second MLP projection + bias, before dropout
    Matrix mlp_mask;     // dropout keep-scales; empty in eval mode
    Matrix x_out;        // L x d
};

struct ForwardTrace {
    std::vector<int> tokens;
    bool train_mode = false;
    Matrix x0;  // L x d, token + position embeddings
    std::vector<LayerTrace> layers;
    std::vector<double> pooled;  // d
    std::vector<double> logits;  // num_classes
    std::vector<double> probs;   // num_classes
};

// Full forward pass with cached intermediates. Dropout fires only in train
// mode (inverted scaling, so eval needs no rescale); eval is deterministic.
ForwardTrace forward(const ModelParams& params, std::span<const int> tokens, bool train_mode,
                     RngStream* rng);

// Backprop from d(objective)/dlogits down to the embedded input. Parameter
// gradients accumulate into `grads` when non-null; the return value is
// d(objective)/dX0 (one row per token, before the embedding-table scatter).
Matrix backward_from_logits(const ModelParams& params, const ForwardTrace& trace,
                            std::span<const double> dlogits, ModelParams* grads);

struct TokenizedExample {
    std::vector<int> tokens;
    int label = 0;
};

struct LossResult {
    double loss = 0.0;
    ModelParams grads;
};

// Mean cross-entropy over the batch plus gradients for every parameter.
LossResult loss_and_gradients(const ModelParams& params, std::span<const TokenizedExample> batch,
                              RngStream* rng, bool train_mode = true);

double batch_loss(const ModelParams& params, std::span<const TokenizedExample> batch);

// One epsilon-rule propagation through a linear layer z_j = sum_i x_i w_ij + b_j:
//   r_i = sum_j x_i w_ij / (z_j + eps * sign(z_j)) * r_j
// `absorbed` (optional) accumulates sum(r_out) - sum(r_in), the share taken by
// bias terms and the stabilizer.
std::vector<double> lrp_linear(std::span<const double> x, const Matrix& w,
                               std::span<const double> z, std::span<const double> r_out,
                               double eps, double* absorbed = nullptr);

struct LrpResult {
    Matrix token_relevance;     // L x d relevance at the embedded input
    double output_relevance = 0.0;  // the target-class probability the pass started from
    double absorbed = 0.0;          // total relevance lost to biases and the stabilizer
};

// Relevance backprop for one eval-mode trace: starts from the target-class
// probability, applies the epsilon rule through linear layers, passes ReLU
// unchanged, treats attention weights as constants (value path only) and
// splits residual sums proportionally to each branch's contribution.
LrpResult lrp_relevance(const ModelParams& params, const ForwardTrace& trace,
                        std::size_t target_class, double epsilon = 1e-9);

// Eval-mode conveniences for analysis exports.
std::vector<double> pooled_embedding(const ModelParams& params, std::span<const int> tokens);
std::vector<double> token_embedding(const ModelParams& params, int token_id);

}  // namespace pcs
