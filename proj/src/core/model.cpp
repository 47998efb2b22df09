#include "model.hpp"

#include <algorithm>
#include <cmath>

namespace pcs {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;

double sign_or_one(double v) { return v < 0.0 ? -1.0 : 1.0; }

void fill_uniform_scaled(Matrix& m, double sigma, RngStream& rng) {
    const double half_width = kSqrt3 * sigma;
    for (double& v : m.data()) v = rng.uniform(-half_width, half_width);
}

void add_row_broadcast(Matrix& m, const Matrix& bias) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double* row = m.row_ptr(r);
        const double* b = bias.row_ptr(0);
        for (std::size_t c = 0; c < m.cols(); ++c) row[c] += b[c];
    }
}

Matrix linear(const Matrix& x, const Matrix& w, const Matrix& b) {
    Matrix out = matmul(x, w);
    add_row_broadcast(out, b);
    return out;
}

Matrix slice_cols(const Matrix& m, std::size_t c0, std::size_t width) {
    Matrix out(m.rows(), width);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < width; ++c) out.at(r, c) = m.at(r, c0 + c);
    return out;
}

void add_into_cols(Matrix& dst, const Matrix& src, std::size_t c0) {
    for (std::size_t r = 0; r < src.rows(); ++r)
        for (std::size_t c = 0; c < src.cols(); ++c) dst.at(r, c0 + c) += src.at(r, c);
}

void accumulate(Matrix& dst, const Matrix& src) {
    if (!dst.same_shape(src)) throw ShapeError("accumulate: shape mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

void add_col_sums(Matrix& bias_grad, const Matrix& d) {
    for (std::size_t r = 0; r < d.rows(); ++r)
        for (std::size_t c = 0; c < d.cols(); ++c) bias_grad.at(0, c) += d.at(r, c);
}

Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, RngStream& rng) {
    Matrix mask(rows, cols, 1.0);
    if (rate <= 0.0) return mask;
    const double keep_scale = 1.0 / (1.0 - rate);
    for (double& v : mask.data()) v = rng.uniform() < rate ? 0.0 : keep_scale;
    return mask;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
    return out;
}

}  // namespace

void ModelConfig::validate() const {
    if (vocab_size < 1 || embed_dim < 1 || num_layers < 1 || num_heads < 1 || mlp_hidden < 1 ||
        num_classes < 1 || max_seq_len < 1)
        throw ConfigError("model config: all counts must be >= 1");
    if (embed_dim % num_heads != 0)
        throw ConfigError("model config: embed_dim must be divisible by num_heads");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw ConfigError("model config: dropout_rate must lie in [0, 1)");
}

void ModelParams::for_each_tensor(const std::function<void(const std::string&, Matrix&)>& fn) {
    fn("embedding", embedding);
    fn("position", position);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        LayerParams& lp = layers[l];
        fn(p + "wq", lp.wq);
        fn(p + "bq", lp.bq);
        fn(p + "wk", lp.wk);
        fn(p + "bk", lp.bk);
        fn(p + "wv", lp.wv);
        fn(p + "bv", lp.bv);
        fn(p + "wo", lp.wo);
        fn(p + "bo", lp.bo);
        fn(p + "w1", lp.w1);
        fn(p + "b1", lp.b1);
        fn(p + "w2", lp.w2);
        fn(p + "b2", lp.b2);
    }
    fn("wc", wc);
    fn("bc", bc);
}

void ModelParams::for_each_tensor(
    const std::function<void(const std::string&, const Matrix&)>& fn) const {
    auto* self = const_cast<ModelParams*>(this);
    self->for_each_tensor([&fn](const std::string& name, Matrix& m) {
        fn(name, static_cast<const Matrix&>(m));
    });
}

std::vector<Matrix*> ModelParams::tensors() {
    std::vector<Matrix*> out;
    for_each_tensor([&out](const std::string&, Matrix& m) { out.push_back(&m); });
    return out;
}

std::vector<const Matrix*> ModelParams::tensors() const {
    std::vector<const Matrix*> out;
    for_each_tensor([&out](const std::string&, const Matrix& m) { out.push_back(&m); });
    return out;
}

std::vector<Matrix*> ModelParams::encoder_tensors() {
    std::vector<Matrix*> out = tensors();
    out.pop_back();  // bc
    out.pop_back();  // wc
    return out;
}

std::vector<Matrix*> ModelParams::head_tensors() { return {&wc, &bc}; }

ModelParams init_params(const ModelConfig& config, RngStream& rng) {
    config.validate();
    const std::size_t d = config.embed_dim;
    ModelParams p;
    p.config = config;
    p.embedding = Matrix(config.vocab_size, d);
    p.position = Matrix(config.max_seq_len, d);
    const double embed_sigma = 1.0 / std::sqrt(static_cast<double>(d));
    fill_uniform_scaled(p.embedding, embed_sigma, rng);
    fill_uniform_scaled(p.position, embed_sigma, rng);
    p.layers.resize(config.num_layers);
    const double proj_sigma = 1.0 / std::sqrt(static_cast<double>(d));
    const double mlp_sigma = 1.0 / std::sqrt(static_cast<double>(config.mlp_hidden));
    for (LayerParams& lp : p.layers) {
        lp.wq = Matrix(d, d);
        lp.wk = Matrix(d, d);
        lp.wv = Matrix(d, d);
        lp.wo = Matrix(d, d);
        fill_uniform_scaled(lp.wq, proj_sigma, rng);
        fill_uniform_scaled(lp.wk, proj_sigma, rng);
        fill_uniform_scaled(lp.wv, proj_sigma, rng);
        fill_uniform_scaled(lp.wo, proj_sigma, rng);
        lp.bq = Matrix(1, d);
        lp.bk = Matrix(1, d);
        lp.bv = Matrix(1, d);
        lp.bo = Matrix(1, d);
        lp.w1 = Matrix(d, config.mlp_hidden);
        lp.w2 = Matrix(config.mlp_hidden, d);
        fill_uniform_scaled(lp.w1, proj_sigma, rng);
        fill_uniform_scaled(lp.w2, mlp_sigma, rng);
        lp.b1 = Matrix(1, config.mlp_hidden);
        lp.b2 = Matrix(1, d);
    }
    p.wc = Matrix(d, config.num_classes);
    fill_uniform_scaled(p.wc, proj_sigma, rng);
    p.bc = Matrix(1, config.num_classes);
    return p;
}

ModelParams zeros_like(const ModelParams& params) {
    ModelParams z;
    z.config = params.config;
    z.embedding = Matrix(params.embedding.rows(), params.embedding.cols());
    z.position = Matrix(params.position.rows(), params.position.cols());
    z.layers.resize(params.layers.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const LayerParams& src = params.layers[l];
        LayerParams& dst = z.layers[l];
        dst.wq = Matrix(src.wq.rows(), src.wq.cols());
        dst.bq = Matrix(src.bq.rows(), src.bq.cols());
        dst.wk = Matrix(src.wk.rows(), src.wk.cols());
        dst.bk = Matrix(src.bk.rows(), src.bk.cols());
        dst.wv = Matrix(src.wv.rows(), src.wv.cols());
        dst.bv = Matrix(src.bv.rows(), src.bv.cols());
        dst.wo = Matrix(src.wo.rows(), src.wo.cols());
        dst.bo = Matrix(src.bo.rows(), src.bo.cols());
        dst.w1 = Matrix(src.w1.rows(), src.w1.cols());
        dst.b1 = Matrix(src.b1.rows(), src.b1.cols());
        dst.w2 = Matrix(src.w2.rows(), src.w2.cols());
        dst.b2 = Matrix(src.b2.rows(), src.b2.cols());
    }
    z.wc = Matrix(params.wc.rows(), params.wc.cols());
    z.bc = Matrix(params.bc.rows(), params.bc.cols());
    return z;
}

ForwardTrace forward(const ModelParams& params, std::span<const int> tokens, bool train_mode,
                     RngStream* rng) {
    const ModelConfig& cfg = params.config;
    if (tokens.empty()) throw DataError("forward: empty token sequence");
    if (tokens.size() > cfg.max_seq_len)
        throw DataError("forward: sequence length " + std::to_string(tokens.size()) +
                        " exceeds max_seq_len " + std::to_string(cfg.max_seq_len));
    for (int id : tokens)
        if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size)
            throw DataError("forward: token id " + std::to_string(id) + " out of range");
    if (train_mode && cfg.dropout_rate > 0.0 && rng == nullptr)
        throw ConfigError("forward: train mode with dropout requires an rng");

    const std::size_t L = tokens.size();
    const std::size_t d = cfg.embed_dim;
    const std::size_t dh = cfg.head_dim();

    ForwardTrace trace;
    trace.tokens.assign(tokens.begin(), tokens.end());
    trace.train_mode = train_mode;
    trace.x0 = Matrix(L, d);
    for (std::size_t i = 0; i < L; ++i) {
        const double* e = params.embedding.row_ptr(static_cast<std::size_t>(tokens[i]));
        const double* pos = params.position.row_ptr(i);
        double* out = trace.x0.row_ptr(i);
        for (std::size_t c = 0; c < d; ++c) out[c] = e[c] + pos[c];
    }

    Matrix x = trace.x0;
    trace.layers.resize(cfg.num_layers);
    const double scale = std::sqrt(static_cast<double>(dh));
    for (std::size_t l = 0; l < cfg.num_layers; ++l) {
        const LayerParams& lp = params.layers[l];
        LayerTrace& lt = trace.layers[l];
        lt.x_in = x;
        lt.q = linear(x, lp.wq, lp.bq);
        lt.k = linear(x, lp.wk, lp.bk);
        lt.v = linear(x, lp.wv, lp.bv);
        lt.attn.resize(cfg.num_heads);
        lt.attn_concat = Matrix(L, d);
        for (std::size_t h = 0; h < cfg.num_heads; ++h) {
            const std::size_t c0 = h * dh;
            Matrix scores(L, L);
            for (std::size_t i = 0; i < L; ++i)
                for (std::size_t j = 0; j < L; ++j) {
                    double s = 0.0;
                    for (std::size_t c = 0; c < dh; ++c)
                        s += lt.q.at(i, c0 + c) * lt.k.at(j, c0 + c);
                    scores.at(i, j) = s / scale;
                }
            Matrix& a = lt.attn[h];
            a = Matrix(L, L);
            for (std::size_t i = 0; i < L; ++i) {
                auto row = softmax(scores.row(i));
                std::copy(row.begin(), row.end(), a.row_ptr(i));
            }
            for (std::size_t i = 0; i < L; ++i)
                for (std::size_t c = 0; c < dh; ++c) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < L; ++j) s += a.at(i, j) * lt.v.at(j, c0 + c);
                    lt.attn_concat.at(i, c0 + c) = s;
                }
        }
        lt.attn_out = linear(lt.attn_concat, lp.wo, lp.bo);
        Matrix attn_branch = lt.attn_out;
        if (train_mode && cfg.dropout_rate > 0.0) {
            lt.attn_mask = dropout_mask(L, d, cfg.dropout_rate, *rng);
            attn_branch = hadamard(lt.attn_out, lt.attn_mask);
        }
        lt.x_mid = lt.x_in;
        accumulate(lt.x_mid, attn_branch);

        lt.mlp_pre = linear(lt.x_mid, lp.w1, lp.b1);
        lt.mlp_act = lt.mlp_pre;
        for (double& v : lt.mlp_act.data()) v = v > 0.0 ? v : 0.0;
        lt.mlp_out = linear(lt.mlp_act, lp.w2, lp.b2);
        Matrix mlp_branch = lt.mlp_out;
        if (train_mode && cfg.dropout_rate > 0.0) {
            lt.mlp_mask = dropout_mask(L, d, cfg.dropout_rate, *rng);
            mlp_branch = hadamard(lt.mlp_out, lt.mlp_mask);
        }
        lt.x_out = lt.x_mid;
        accumulate(lt.x_out, mlp_branch);
        x = lt.x_out;
    }

    trace.pooled.assign(d, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
        const double* row = x.row_ptr(i);
        for (std::size_t c = 0; c < d; ++c) trace.pooled[c] += row[c];
    }
    const double inv_len = 1.0 / static_cast<double>(L);
    for (double& v : trace.pooled) v *= inv_len;

    trace.logits.assign(cfg.num_classes, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        const double pv = trace.pooled[c];
        for (std::size_t j = 0; j < cfg.num_classes; ++j)
            trace.logits[j] += pv * params.wc.at(c, j);
    }
    for (std::size_t j = 0; j < cfg.num_classes; ++j) trace.logits[j] += params.bc.at(0, j);
    trace.probs = softmax(trace.logits);
    return trace;
}

Matrix backward_from_logits(const ModelParams& params, const ForwardTrace& trace,
                            std::span<const double> dlogits, ModelParams* grads) {
    const ModelConfig& cfg = params.config;
    if (dlogits.size() != cfg.num_classes)
        throw ShapeError("backward_from_logits: dlogits size mismatch");
    const std::size_t L = trace.tokens.size();
    const std::size_t d = cfg.embed_dim;
    const std::size_t dh = cfg.head_dim();
    const double scale = std::sqrt(static_cast<double>(dh));

    std::vector<double> dpooled(d, 0.0);
    for (std::size_t c = 0; c < d; ++c)
        for (std::size_t j = 0; j < cfg.num_classes; ++j)
            dpooled[c] += params.wc.at(c, j) * dlogits[j];
    if (grads) {
        for (std::size_t c = 0; c < d; ++c)
            for (std::size_t j = 0; j < cfg.num_classes; ++j)
                grads->wc.at(c, j) += trace.pooled[c] * dlogits[j];
        for (std::size_t j = 0; j < cfg.num_classes; ++j) grads->bc.at(0, j) += dlogits[j];
    }

    const double inv_len = 1.0 / static_cast<double>(L);
    Matrix dx(L, d);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t c = 0; c < d; ++c) dx.at(i, c) = dpooled[c] * inv_len;

    for (std::size_t l = cfg.num_layers; l-- > 0;) {
        const LayerParams& lp = params.layers[l];
        const LayerTrace& lt = trace.layers[l];
        const bool dropped = trace.train_mode && cfg.dropout_rate > 0.0;

        // x_out = x_mid + dropout(mlp_out)
        Matrix dmlp_out = dropped ? hadamard(dx, lt.mlp_mask) : dx;
        Matrix dx_mid = dx;

        Matrix dmlp_act = matmul(dmlp_out, transpose(lp.w2));
        if (grads) {
            matmul_acc(transpose(lt.mlp_act), dmlp_out, grads->layers[l].w2);
            add_col_sums(grads->layers[l].b2, dmlp_out);
        }
        Matrix dmlp_pre = dmlp_act;
        for (std::size_t i = 0; i < dmlp_pre.size(); ++i)
            if (lt.mlp_pre.data()[i] <= 0.0) dmlp_pre.data()[i] = 0.0;
        if (grads) {
            matmul_acc(transpose(lt.x_mid), dmlp_pre, grads->layers[l].w1);
            add_col_sums(grads->layers[l].b1, dmlp_pre);
        }
        accumulate(dx_mid, matmul(dmlp_pre, transpose(lp.w1)));

        // x_mid = x_in + dropout(attn_out)
        Matrix dattn_out = dropped ? hadamard(dx_mid, lt.attn_mask) : dx_mid;
        Matrix dx_in = dx_mid;

        if (grads) {
            matmul_acc(transpose(lt.attn_concat), dattn_out, grads->layers[l].wo);
            add_col_sums(grads->layers[l].bo, dattn_out);
        }
        Matrix dattn_concat = matmul(dattn_out, transpose(lp.wo));

        Matrix dq(L, d), dk(L, d), dv(L, d);
        for (std::size_t h = 0; h < cfg.num_heads; ++h) {
            const std::size_t c0 = h * dh;
            const Matrix& a = lt.attn[h];
            Matrix doh = slice_cols(dattn_concat, c0, dh);
            Matrix vh = slice_cols(lt.v, c0, dh);
            Matrix qh = slice_cols(lt.q, c0, dh);
            Matrix kh = slice_cols(lt.k, c0, dh);

            Matrix da = matmul(doh, transpose(vh));        // L x L
            Matrix dvh = matmul(transpose(a), doh);        // L x dh
            Matrix ds(L, L);
            for (std::size_t i = 0; i < L; ++i) {
                double inner = 0.0;
                for (std::size_t j = 0; j < L; ++j) inner += da.at(i, j) * a.at(i, j);
                for (std::size_t j = 0; j < L; ++j)
                    ds.at(i, j) = a.at(i, j) * (da.at(i, j) - inner);
            }
            Matrix dqh = matmul(ds, kh);
            Matrix dkh = matmul(transpose(ds), qh);
            for (double& vl : dqh.data()) vl /= scale;
            for (double& vl : dkh.data()) vl /= scale;
            add_into_cols(dq, dqh, c0);
            add_into_cols(dk, dkh, c0);
            add_into_cols(dv, dvh, c0);
        }

        if (grads) {
            matmul_acc(transpose(lt.x_in), dq, grads->layers[l].wq);
            add_col_sums(grads->layers[l].bq, dq);
            matmul_acc(transpose(lt.x_in), dk, grads->layers[l].wk);
            add_col_sums(grads->layers[l].bk, dk);
            matmul_acc(transpose(lt.x_in), dv, grads->layers[l].wv);
            add_col_sums(grads->layers[l].bv, dv);
        }
        accumulate(dx_in, matmul(dq, transpose(lp.wq)));
        accumulate(dx_in, matmul(dk, transpose(lp.wk)));
        accumulate(dx_in, matmul(dv, transpose(lp.wv)));
        dx = dx_in;
    }
    return dx;
}

LossResult loss_and_gradients(const ModelParams& params, std::span<const TokenizedExample> batch,
                              RngStream* rng, bool train_mode) {
    if (batch.empty()) throw DataError("loss_and_gradients: empty batch");
    const std::size_t C = params.config.num_classes;
    LossResult result;
    result.grads = zeros_like(params);
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    for (const TokenizedExample& ex : batch) {
        if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= C)
            throw DataError("loss_and_gradients: label " + std::to_string(ex.label) +
                            " out of range");
        ForwardTrace trace = forward(params, ex.tokens, train_mode, rng);
        // Stable -log p via log-sum-exp on the logits.
        double mx = trace.logits[0];
        for (double v : trace.logits) mx = std::max(mx, v);
        double lse = 0.0;
        for (double v : trace.logits) lse += std::exp(v - mx);
        result.loss += (std::log(lse) + mx - trace.logits[static_cast<std::size_t>(ex.label)]) *
                       inv_batch;

        std::vector<double> dlogits(C);
        for (std::size_t j = 0; j < C; ++j) {
            dlogits[j] = trace.probs[j] * inv_batch;
        }
        dlogits[static_cast<std::size_t>(ex.label)] -= inv_batch;
        Matrix dx0 = backward_from_logits(params, trace, dlogits, &result.grads);
        for (std::size_t i = 0; i < dx0.rows(); ++i) {
            const double* src = dx0.row_ptr(i);
            double* erow =
                result.grads.embedding.row_ptr(static_cast<std::size_t>(trace.tokens[i]));
            double* prow = result.grads.position.row_ptr(i);
            for (std::size_t c = 0; c < dx0.cols(); ++c) {
                erow[c] += src[c];
                prow[c] += src[c];
            }
        }
    }
    if (!std::isfinite(result.loss)) throw NumericError("loss_and_gradients: non-finite loss");
    return result;
}

double batch_loss(const ModelParams& params, std::span<const TokenizedExample> batch) {
    if (batch.empty()) throw DataError("batch_loss: empty batch");
    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    for (const TokenizedExample& ex : batch) {
        ForwardTrace trace = forward(params, ex.tokens, false, nullptr);
        double mx = trace.logits[0];
        for (double v : trace.logits) mx = std::max(mx, v);
        double lse = 0.0;
        for (double v : trace.logits) lse += std::exp(v - mx);
        loss += (std::log(lse) + mx - trace.logits[static_cast<std::size_t>(ex.label)]) * inv_batch;
    }
    return loss;
}

std::vector<double> lrp_linear(std::span<const double> x, const Matrix& w,
                               std::span<const double> z, std::span<const double> r_out,
                               double eps, double* absorbed) {
    if (x.size() != w.rows() || z.size() != w.cols() || r_out.size() != w.cols())
        throw ShapeError("lrp_linear: shape mismatch");
    std::vector<double> r_in(x.size(), 0.0);
    for (std::size_t j = 0; j < w.cols(); ++j) {
        if (r_out[j] == 0.0) continue;
        const double denom = z[j] + eps * sign_or_one(z[j]);
        const double factor = r_out[j] / denom;
        for (std::size_t i = 0; i < x.size(); ++i) r_in[i] += x[i] * w.at(i, j) * factor;
    }
    if (absorbed) {
        double in_sum = 0.0, out_sum = 0.0;
        for (double v : r_in) in_sum += v;
        for (double v : r_out) out_sum += v;
        *absorbed += out_sum - in_sum;
    }
    return r_in;
}

namespace {

// Proportional split of relevance across a two-branch sum c = a + b.
void split_residual(const Matrix& a, const Matrix& b, const Matrix& total, const Matrix& r,
                    double eps, Matrix& r_a, Matrix& r_b, double& absorbed) {
    r_a = Matrix(a.rows(), a.cols());
    r_b = Matrix(b.rows(), b.cols());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double rv = r.data()[i];
        if (rv == 0.0) continue;
        const double denom = total.data()[i] + eps * sign_or_one(total.data()[i]);
        const double ra = a.data()[i] / denom * rv;
        const double rb = b.data()[i] / denom * rv;
        r_a.data()[i] = ra;
        r_b.data()[i] = rb;
        absorbed += rv - ra - rb;
    }
}

// Epsilon rule applied row-wise through a position-independent linear layer.
Matrix lrp_linear_rows(const Matrix& x, const Matrix& w, const Matrix& z, const Matrix& r_out,
                       double eps, double& absorbed) {
    Matrix r_in(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto row = lrp_linear(x.row(i), w, z.row(i), r_out.row(i), eps, &absorbed);
        std::copy(row.begin(), row.end(), r_in.row_ptr(i));
    }
    return r_in;
}

}  // namespace

LrpResult lrp_relevance(const ModelParams& params, const ForwardTrace& trace,
                        std::size_t target_class, double epsilon) {
    const ModelConfig& cfg = params.config;
    if (trace.train_mode) throw Error("lrp_relevance: trace must come from an eval-mode forward");
    if (target_class >= cfg.num_classes) throw DataError("lrp_relevance: class out of range");
    if (trace.layers.size() != cfg.num_layers || trace.pooled.size() != cfg.embed_dim)
        throw Error("lrp_relevance: trace does not match model");
    const std::size_t L = trace.tokens.size();
    const std::size_t d = cfg.embed_dim;
    const std::size_t dh = cfg.head_dim();

    LrpResult result;
    result.output_relevance = trace.probs[target_class];
    double absorbed = 0.0;

    // Output neuron relevance: the target-class probability flows into its logit.
    std::vector<double> r_logits(cfg.num_classes, 0.0);
    r_logits[target_class] = result.output_relevance;
    std::vector<double> r_pooled =
        lrp_linear(trace.pooled, params.wc, trace.logits, r_logits, epsilon, &absorbed);

    // Mean pooling is a linear layer with weight 1/L per token.
    const Matrix& x_final = trace.layers.back().x_out;
    const double inv_len = 1.0 / static_cast<double>(L);
    Matrix r(L, d);
    for (std::size_t c = 0; c < d; ++c) {
        const double rv = r_pooled[c];
        if (rv == 0.0) continue;
        const double denom = trace.pooled[c] + epsilon * sign_or_one(trace.pooled[c]);
        double flowed = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            const double share = x_final.at(i, c) * inv_len / denom * rv;
            r.at(i, c) = share;
            flowed += share;
        }
        absorbed += rv - flowed;
    }

    for (std::size_t l = cfg.num_layers; l-- > 0;) {
        const LayerParams& lp = params.layers[l];
        const LayerTrace& lt = trace.layers[l];

        // x_out = x_mid + mlp_out
        Matrix r_mid, r_mlp_out;
        split_residual(lt.x_mid, lt.mlp_out, lt.x_out, r, epsilon, r_mid, r_mlp_out, absorbed);

        // MLP branch: epsilon rule through w2, ReLU passed through, then w1.
        Matrix r_mlp_act = lrp_linear_rows(lt.mlp_act, lp.w2, lt.mlp_out, r_mlp_out, epsilon,
                                           absorbed);
        Matrix r_from_mlp = lrp_linear_rows(lt.x_mid, lp.w1, lt.mlp_pre, r_mlp_act, epsilon,
                                            absorbed);
        accumulate(r_mid, r_from_mlp);

        // x_mid = x_in + attn_out
        Matrix r_in, r_attn_out;
        split_residual(lt.x_in, lt.attn_out, lt.x_mid, r_mid, epsilon, r_in, r_attn_out, absorbed);

        // Attention branch: output projection, then the value path with the
        // attention weights held constant; query/key receive nothing.
        Matrix r_concat = lrp_linear_rows(lt.attn_concat, lp.wo, lt.attn_out, r_attn_out, epsilon,
                                          absorbed);
        Matrix r_v(L, d);
        for (std::size_t h = 0; h < cfg.num_heads; ++h) {
            const std::size_t c0 = h * dh;
            const Matrix& a = lt.attn[h];
            for (std::size_t c = 0; c < dh; ++c) {
                for (std::size_t i = 0; i < L; ++i) {
                    const double rv = r_concat.at(i, c0 + c);
                    if (rv == 0.0) continue;
                    const double z = lt.attn_concat.at(i, c0 + c);
                    const double denom = z + epsilon * sign_or_one(z);
                    const double factor = rv / denom;
                    double flowed = 0.0;
                    for (std::size_t j = 0; j < L; ++j) {
                        const double share = a.at(i, j) * lt.v.at(j, c0 + c) * factor;
                        r_v.at(j, c0 + c) += share;
                        flowed += share;
                    }
                    absorbed += rv - flowed;
                }
            }
        }
        Matrix r_from_attn = lrp_linear_rows(lt.x_in, lp.wv, lt.v, r_v, epsilon, absorbed);
        accumulate(r_in, r_from_attn);
        r = r_in;
    }

    result.token_relevance = r;
    result.absorbed = absorbed;
    return result;
}

std::vector<double> pooled_embedding(const ModelParams& params, std::span<const int> tokens) {
    return forward(params, tokens, false, nullptr).pooled;
}

std::vector<double> token_embedding(const ModelParams& params, int token_id) {
    if (token_id < 0 || static_cast<std::size_t>(token_id) >= params.config.vocab_size)
        throw DataError("token_embedding: id out of range");
    auto row = params.embedding.row(static_cast<std::size_t>(token_id));
    return {row.begin(), row.end()};
}

}  // namespace pcs
