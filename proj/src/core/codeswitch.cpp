#include "codeswitch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace pcs {

void SwitchPolicy::validate() const {
    if (!(temperature >= 0.0 && temperature <= 1.0))
        throw ConfigError("switch policy: temperature must lie in [0, 1]");
    if (target_langs.empty()) throw ConfigError("switch policy: no target languages");
    for (const std::string& lang : target_langs)
        if (!lexicons.count(lang))
            throw ConfigError("switch policy: missing lexicon for language " + lang);
    if (single_target && target_langs.size() != 1)
        throw ConfigError("switch policy: single-target mode requires exactly one language");
}

std::vector<std::size_t> eligible_indices(const LabeledExample& example,
                                          const SwitchPolicy& policy) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < example.sentence.tokens.size(); ++i) {
        const std::string& tok = example.sentence.tokens[i];
        for (const std::string& lang : policy.target_langs) {
            if (policy.lexicons.at(lang).covers(tok)) {
                eligible.push_back(i);
                break;
            }
        }
    }
    return eligible;
}

std::size_t replacement_count(double temperature, std::size_t eligible_count) {
    const std::size_t n =
        static_cast<std::size_t>(std::floor(temperature * static_cast<double>(eligible_count) + 0.5));
    return std::min(n, eligible_count);
}

SwitchedExample switch_example(const LabeledExample& example, const RelevanceProfile& profile,
                               const SwitchPolicy& policy, RngStream& rng,
                               std::size_t original_index) {
    if (profile.scores.size() != example.sentence.tokens.size())
        throw DataError("switch_example: profile does not match the sentence");
    policy.validate();

    SwitchedExample out;
    out.original_index = original_index;
    out.sentence = example.sentence;
    out.label = example.label;

    const std::vector<std::size_t> eligible = eligible_indices(example, policy);
    const std::size_t n = replacement_count(policy.temperature, eligible.size());
    if (n == 0) return out;

    const std::vector<std::size_t> order = rank_ascending(profile, eligible);
    // Draws happen in rank order: lower temperatures consume a prefix of the
    // same stream, so nested stages agree on the shared replacements.
    std::vector<std::string> covering;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t idx = order[r];
        const std::string& tok = example.sentence.tokens[idx];
        covering.clear();
        for (const std::string& lang : policy.target_langs)
            if (policy.lexicons.at(lang).covers(tok)) covering.push_back(lang);
        const std::string& lang = covering[rng.index(covering.size())];
        const auto& translations = policy.lexicons.at(lang).translations(tok);
        out.sentence.tokens[idx] = translations[rng.index(translations.size())];
        out.sentence.langs[idx] = lang;
        out.replaced.push_back(idx);
    }
    std::sort(out.replaced.begin(), out.replaced.end());
    return out;
}

std::vector<SwitchedExample> generate_stage_dataset(const Dataset& dataset,
                                                    const std::vector<RelevanceProfile>& profiles,
                                                    double temperature,
                                                    const SwitchPolicy& policy,
                                                    std::size_t stage_id, const RngStream& rng) {
    if (profiles.size() < dataset.size())
        throw DataError("generate_stage_dataset: profiles do not cover the dataset");
    SwitchPolicy stage_policy = policy;
    stage_policy.temperature = temperature;
    const RngStream stage_rng = rng.split("stage", stage_id);
    std::vector<SwitchedExample> out;
    out.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        RngStream child = stage_rng.split("example", i);
        out.push_back(switch_example(dataset[i], profiles[i], stage_policy, child, i));
    }
    return out;
}

void save_stage_dataset(const std::vector<SwitchedExample>& stage, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write stage dataset: " + path);
    for (const SwitchedExample& ex : stage) {
        out << ex.label << '\t';
        for (std::size_t i = 0; i < ex.sentence.tokens.size(); ++i) {
            if (i) out << ' ';
            out << ex.sentence.tokens[i];
        }
        out << '\t';
        for (std::size_t i = 0; i < ex.sentence.langs.size(); ++i) {
            if (i) out << ' ';
            out << ex.sentence.langs[i];
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing stage dataset: " + path);
}

}  // namespace pcs
