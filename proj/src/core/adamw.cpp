#include "adamw.hpp"

#include <cmath>

namespace pcs {

AdamW::AdamW(const std::vector<const Matrix*>& params, AdamWConfig config) : config_(config) {
    if (!(config_.learning_rate > 0.0)) throw ConfigError("adamw: learning rate must be > 0");
    first_moment_.reserve(params.size());
    second_moment_.reserve(params.size());
    for (const Matrix* p : params) {
        first_moment_.emplace_back(p->rows(), p->cols());
        second_moment_.emplace_back(p->rows(), p->cols());
    }
}

void AdamW::step(std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads) {
    if (params.size() != first_moment_.size() || grads.size() != params.size())
        throw ShapeError("adamw: tensor list mismatch");
    ++step_count_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
    const double lr = config_.learning_rate;
    for (std::size_t t = 0; t < params.size(); ++t) {
        Matrix& p = *params[t];
        const Matrix& g = *grads[t];
        Matrix& m = first_moment_[t];
        Matrix& v = second_moment_[t];
        if (!p.same_shape(g) || !p.same_shape(m))
            throw ShapeError("adamw: shape mismatch at tensor " + std::to_string(t));
        double* pd = p.data().data();
        const double* gd = g.data().data();
        double* md = m.data().data();
        double* vd = v.data().data();
        const std::size_t n = p.size();
        for (std::size_t i = 0; i < n; ++i) {
            md[i] = b1 * md[i] + (1.0 - b1) * gd[i];
            vd[i] = b2 * vd[i] + (1.0 - b2) * gd[i] * gd[i];
            const double mhat = md[i] / bias1;
            const double vhat = vd[i] / bias2;
            // Decoupled decay: the regularization term never touches the moments.
            pd[i] -= lr * (mhat / (std::sqrt(vhat) + config_.epsilon) + config_.weight_decay * pd[i]);
        }
    }
}

}  // namespace pcs
