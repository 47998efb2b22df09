#pragma once

#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "relevance.hpp"
#include "rng.hpp"

namespace pcs {

// Controls one code-switching pass: the temperature is the fraction of
// dictionary-covered words to replace, lowest-relevance first.
struct SwitchPolicy {
    double temperature = 0.0;
    std::vector<std::string> target_langs;
    std::map<std::string, BilingualLexicon> lexicons;  // keyed by target language
    bool single_target = false;  // TGT-Only ablation: one language for the whole corpus

    void validate() const;
};

struct SwitchedExample {
    std::size_t original_index = 0;
    Sentence sentence;
    std::vector<std::size_t> replaced;  // ascending positions
    int label = 0;
};

// Indices whose token is covered by at least one policy lexicon.
std::vector<std::size_t> eligible_indices(const LabeledExample& example,
                                          const SwitchPolicy& policy);

// Replace the round(tau * |eligible|) least-relevant eligible words; for each,
// a covering language and then a translation are drawn uniformly. The label
// and all unreplaced tokens are untouched.
SwitchedExample switch_example(const LabeledExample& example, const RelevanceProfile& profile,
                               const SwitchPolicy& policy, RngStream& rng,
                               std::size_t original_index = 0);

// One curriculum stage dataset: per-example child streams split from
// (rng, stage_id, example index), so the result depends only on those.
std::vector<SwitchedExample> generate_stage_dataset(const Dataset& dataset,
                                                    const std::vector<RelevanceProfile>& profiles,
                                                    double temperature,
                                                    const SwitchPolicy& policy,
                                                    std::size_t stage_id, const RngStream& rng);

// Round-half-up replacement count, capped at the eligible count.
std::size_t replacement_count(double temperature, std::size_t eligible_count);

// TSV dump with a trailing per-token language tag column.
void save_stage_dataset(const std::vector<SwitchedExample>& stage, const std::string& path);

}  // namespace pcs
