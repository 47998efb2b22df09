#pragma once

#include <functional>
#include <vector>

#include "matrix.hpp"

namespace pcs {

// Central-difference gradient estimate (f(x+h) - f(x-h)) / 2h per coordinate.
// `f` is evaluated with the parameter tensors temporarily perturbed in place;
// they are restored before returning. The oracle side of every gradient check
// in this project.
std::vector<Matrix> finite_difference_gradient(const std::function<double()>& f,
                                               std::vector<Matrix*> params,
                                               double h = 1e-5);

std::vector<double> finite_difference_gradient(const std::function<double()>& f,
                                               std::vector<double>& params, double h = 1e-5);

}  // namespace pcs
