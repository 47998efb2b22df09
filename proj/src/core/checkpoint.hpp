#pragma once

#include <string>

#include "model.hpp"

namespace pcs {

// Binary model container: magic, JSON header (config + tensor manifest with
// shapes), then little-endian float64 payloads. save(load(f)) is bit-exact.
void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace pcs
