#include "finite_diff.hpp"

#include <cmath>

namespace pcs {
namespace {

double eval_checked(const std::function<double()>& f) {
    const double v = f();
    if (!std::isfinite(v)) throw NumericError("finite_difference_gradient: non-finite objective");
    return v;
}

}  // namespace

std::vector<Matrix> finite_difference_gradient(const std::function<double()>& f,
                                               std::vector<Matrix*> params, double h) {
    std::vector<Matrix> grads;
    grads.reserve(params.size());
    for (Matrix* p : params) grads.emplace_back(p->rows(), p->cols());
    for (std::size_t t = 0; t < params.size(); ++t) {
        auto& data = params[t]->data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double saved = data[i];
            data[i] = saved + h;
            const double up = eval_checked(f);
            data[i] = saved - h;
            const double down = eval_checked(f);
            data[i] = saved;
            grads[t].data()[i] = (up - down) / (2.0 * h);
        }
    }
    return grads;
}

std::vector<double> finite_difference_gradient(const std::function<double()>& f,
                                               std::vector<double>& params, double h) {
    std::vector<double> grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = eval_checked(f);
        params[i] = saved - h;
        const double down = eval_checked(f);
        params[i] = saved;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

}  // namespace pcs
