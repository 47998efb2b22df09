#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace pcs {

// Scheduler behavior. Modes that only change the difficulty measurer or the
// language set (grad_cl, tgt_only) map onto `pcs` here; `no_cs` maps onto
// `no_cl` with switching disabled by the trainer.
enum class CurriculumMode { Pcs, RatioCl, AntiCl, NoScheduler, NoCl };

CurriculumMode curriculum_mode_from_string(const std::string& s);
std::string to_string(CurriculumMode mode);

struct CurriculumConfig {
    double delta = 0.1;              // temperature increment per stage
    std::size_t base_patience = 2;   // p0, evaluations without improvement
    std::size_t patience_step = 1;   // added per stage: harder stages wait longer
    double min_delta = 1e-4;         // absolute improvement threshold
    std::size_t max_stage_steps = 0;  // optional cap; 0 = unbounded
    CurriculumMode mode = CurriculumMode::Pcs;

    void validate() const;
    std::size_t num_stages() const;  // K = 1/delta + 1 (1 in no_cl mode)
    // Stage-dependent early-stopping budget: harder stages wait longer. The
    // single-stage no_cl mode gets the ladder's final-stage patience so the
    // baseline's stopping criterion is comparable to the full curriculum's.
    std::size_t patience(std::size_t stage) const;
    // Per-stage step cap (0 = unbounded). Single-stage modes get the whole
    // ladder's budget so baselines train as long as the full curriculum.
    std::size_t stage_step_cap() const;
};

// Stage bookkeeping: the trainer owns the stage dataset cache, one dataset
// per stage from 1 to `stage`, generated on entry.
struct CurriculumState {
    std::size_t stage = 1;
    double temperature = 0.0;
    double best_val_loss = 0.0;
    bool has_best = false;
    std::size_t evals_since_improvement = 0;
    std::size_t steps_in_stage = 0;
};

enum class AdvanceDecision { Stay, Advance, Finish };
std::string to_string(AdvanceDecision d);

// Linear ladder tau = (k-1) * delta, snapped to exactly 1 at the final stage;
// anti-curriculum runs the identical values in reverse.
double stage_temperature(std::size_t stage, const CurriculumConfig& config);

// Eq-style replay weights over stages 1..k: P(i) = e^{i-k} / sum_i e^{i-k}.
// Strictly increasing, sums to 1; the current stage is the mode.
std::vector<double> replay_distribution(std::size_t stage);

// Draw the stage whose dataset feeds the next batch; `no_scheduler` always
// trains on the newest stage.
std::size_t sample_stage(const CurriculumState& state, const CurriculumConfig& config,
                         RngStream& rng);

CurriculumState make_state(const CurriculumConfig& config);

// Patience-based convergence test; mutates the bookkeeping. Advancing is the
// caller's cue to call advance_stage.
AdvanceDecision should_advance(CurriculumState& state, double new_val_loss,
                               const CurriculumConfig& config);

void advance_stage(CurriculumState& state, const CurriculumConfig& config);

// One JSON-lines record per evaluation: enough to replay every scheduling
// decision and reconstruct learning curves.
struct CurriculumTraceRow {
    std::size_t step = 0;
    std::size_t stage = 1;
    double temperature = 0.0;
    double val_loss = 0.0;
    std::string decision;
    std::vector<std::size_t> replay_histogram;  // batches per stage since last eval
};

void save_trace(const std::vector<CurriculumTraceRow>& rows, const std::string& path);

}  // namespace pcs
