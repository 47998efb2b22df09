#pragma once

#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "rng.hpp"

namespace pcs {

// Synthetic multilingual classification benchmark. Content words carry the
// label signal, function words are shared noise, and language l realizes the
// abstract word w as the surface form "w<section-sign>l", so per-language
// vocabularies are disjoint by construction and the no-code-switching
// baseline is provably stuck near chance on target languages.
struct SynthConfig {
    std::size_t num_languages = 3;  // 1 source + targets
    std::size_t vocab_per_lang = 40;
    std::size_t num_train = 2000;
    std::size_t num_dev = 300;
    std::size_t num_test = 300;
    std::size_t num_classes = 2;
    double p_poly = 0.1;         // chance a target word gains a second surface form
    double p_noise = 0.0;        // chance an entry gains a wrong translation
    double func_coverage = 1.0;  // dictionary coverage of function words
    std::size_t content_min = 1, content_max = 2;  // content words per sentence
    std::size_t func_min = 5, func_max = 9;        // function words per sentence

    void validate() const;
};

struct SynthTask {
    SynthConfig config;
    std::uint64_t seed = 0;
    std::string src_lang;
    std::vector<std::string> tgt_langs;
    Dataset train;
    Dataset dev;
    std::map<std::string, Dataset> tests;            // keyed by language, source included
    std::map<std::string, BilingualLexicon> lexicons;  // keyed by target language
};

SynthTask generate_synthetic_task(const SynthConfig& config, std::uint64_t seed);

// Directory layout: train.tsv, dev.tsv, test.<lang>.tsv, dict.<src>-<tgt>.txt,
// manifest.json (seed + config echo). Byte-identical for identical inputs.
void write_synthetic_task(const SynthTask& task, const std::string& dir);
SynthTask load_synthetic_task(const std::string& dir, std::size_t max_seq_len = 128);

// Surface-form introspection used by analysis tooling.
bool is_content_surface(const std::string& token);
bool is_function_surface(const std::string& token);

}  // namespace pcs
