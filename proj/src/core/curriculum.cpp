#include "curriculum.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace pcs {

CurriculumMode curriculum_mode_from_string(const std::string& s) {
    if (s == "pcs") return CurriculumMode::Pcs;
    if (s == "ratio_cl") return CurriculumMode::RatioCl;
    if (s == "anti_cl") return CurriculumMode::AntiCl;
    if (s == "no_scheduler") return CurriculumMode::NoScheduler;
    if (s == "no_cl") return CurriculumMode::NoCl;
    throw ConfigError("unknown curriculum mode: " + s);
}

std::string to_string(CurriculumMode mode) {
    switch (mode) {
        case CurriculumMode::Pcs: return "pcs";
        case CurriculumMode::RatioCl: return "ratio_cl";
        case CurriculumMode::AntiCl: return "anti_cl";
        case CurriculumMode::NoScheduler: return "no_scheduler";
        case CurriculumMode::NoCl: return "no_cl";
    }
    return "?";
}

std::string to_string(AdvanceDecision d) {
    switch (d) {
        case AdvanceDecision::Stay: return "stay";
        case AdvanceDecision::Advance: return "advance";
        case AdvanceDecision::Finish: return "finish";
    }
    return "?";
}

void CurriculumConfig::validate() const {
    if (!(delta > 0.0 && delta <= 1.0))
        throw ConfigError("curriculum: delta must lie in (0, 1]");
    const double inv = 1.0 / delta;
    if (std::fabs(inv - std::round(inv)) > 1e-9)
        throw ConfigError("curriculum: 1/delta must be integral so tau reaches exactly 1");
    if (base_patience < 1) throw ConfigError("curriculum: base patience must be >= 1");
    if (!(min_delta >= 0.0)) throw ConfigError("curriculum: min_delta must be >= 0");
}

std::size_t CurriculumConfig::num_stages() const {
    if (mode == CurriculumMode::NoCl) return 1;
    return static_cast<std::size_t>(std::llround(1.0 / delta)) + 1;
}

std::size_t CurriculumConfig::patience(std::size_t stage) const {
    if (mode == CurriculumMode::NoCl)
        return base_patience +
               static_cast<std::size_t>(std::llround(1.0 / delta)) * patience_step;
    return base_patience + (stage - 1) * patience_step;
}

std::size_t CurriculumConfig::stage_step_cap() const {
    if (max_stage_steps == 0) return 0;
    if (mode == CurriculumMode::NoCl)
        return max_stage_steps * (static_cast<std::size_t>(std::llround(1.0 / delta)) + 1);
    return max_stage_steps;
}

double stage_temperature(std::size_t stage, const CurriculumConfig& config) {
    const std::size_t K = config.num_stages();
    if (stage < 1 || stage > K)
        throw Error("stage_temperature: stage " + std::to_string(stage) + " out of range 1.." +
                    std::to_string(K));
    switch (config.mode) {
        case CurriculumMode::AntiCl:
            // Same ladder values in reverse, bit-for-bit.
            return stage == 1 ? 1.0 : static_cast<double>(K - stage) * config.delta;
        case CurriculumMode::NoCl:
            return 0.0;  // the trainer draws or fixes tau itself in this mode
        default:
            return stage == K ? 1.0 : static_cast<double>(stage - 1) * config.delta;
    }
}

std::vector<double> replay_distribution(std::size_t stage) {
    if (stage < 1) throw Error("replay_distribution: stage must be >= 1");
    std::vector<double> probs(stage);
    double sum = 0.0;
    for (std::size_t i = 1; i <= stage; ++i) {
        probs[i - 1] = std::exp(static_cast<double>(i) - static_cast<double>(stage));
        sum += probs[i - 1];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

std::size_t sample_stage(const CurriculumState& state, const CurriculumConfig& config,
                         RngStream& rng) {
    if (config.mode == CurriculumMode::NoScheduler || state.stage == 1) return state.stage;
    return rng.weighted_index(replay_distribution(state.stage)) + 1;
}

CurriculumState make_state(const CurriculumConfig& config) {
    config.validate();
    CurriculumState state;
    state.stage = 1;
    state.temperature = stage_temperature(1, config);
    return state;
}

AdvanceDecision should_advance(CurriculumState& state, double new_val_loss,
                               const CurriculumConfig& config) {
    if (std::isnan(new_val_loss)) throw NumericError("should_advance: NaN validation loss");
    if (!state.has_best || new_val_loss < state.best_val_loss - config.min_delta) {
        state.best_val_loss = new_val_loss;
        state.has_best = true;
        state.evals_since_improvement = 0;
        return AdvanceDecision::Stay;
    }
    ++state.evals_since_improvement;
    if (state.evals_since_improvement < config.patience(state.stage)) return AdvanceDecision::Stay;
    return state.stage >= config.num_stages() ? AdvanceDecision::Finish : AdvanceDecision::Advance;
}

void advance_stage(CurriculumState& state, const CurriculumConfig& config) {
    if (state.stage >= config.num_stages()) throw Error("advance_stage: already at final stage");
    ++state.stage;
    state.temperature = stage_temperature(state.stage, config);
    state.best_val_loss = 0.0;
    state.has_best = false;
    state.evals_since_improvement = 0;
    state.steps_in_stage = 0;
}

void save_trace(const std::vector<CurriculumTraceRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write curriculum trace: " + path);
    for (const CurriculumTraceRow& row : rows) {
        nlohmann::json j = {{"step", row.step},
                            {"stage", row.stage},
                            {"tau", row.temperature},
                            {"val_loss", row.val_loss},
                            {"decision", row.decision},
                            {"replay_histogram", row.replay_histogram}};
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("failed writing curriculum trace: " + path);
}

}  // namespace pcs
