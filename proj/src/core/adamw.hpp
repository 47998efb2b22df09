#pragma once

#include <cstdint>
#include <vector>

#include "matrix.hpp"

namespace pcs {

struct AdamWConfig {
    double learning_rate = 1e-4;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Decoupled-weight-decay Adam over a fixed list of tensors. Moment
// accumulators mirror the parameter shapes; the step count advances by one
// per update.
class AdamW {
public:
    AdamW() = default;
    AdamW(const std::vector<const Matrix*>& params, AdamWConfig config);

    // params and grads must match the shapes the optimizer was built with.
    void step(std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads);

    std::uint64_t step_count() const { return step_count_; }
    const AdamWConfig& config() const { return config_; }
    void set_learning_rate(double lr) { config_.learning_rate = lr; }

private:
    AdamWConfig config_;
    std::vector<Matrix> first_moment_;
    std::vector<Matrix> second_moment_;
    std::uint64_t step_count_ = 0;
};

}  // namespace pcs
