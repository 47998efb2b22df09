#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"

namespace pcs {

// Lowercase whitespace tokenization. Leading/trailing ASCII punctuation is
// stripped per token (internal hyphens/apostrophes survive); empty tokens are
// dropped.
std::vector<std::string> tokenize(const std::string& text);

struct Sentence {
    std::vector<std::string> tokens;
    std::vector<std::string> langs;  // parallel ISO codes, e.g. "en"

    std::size_t size() const { return tokens.size(); }
};

struct LabeledExample {
    Sentence sentence;
    int label = 0;
};

using Dataset = std::vector<LabeledExample>;

// Word <-> id map with reserved PAD=0 and UNK=1. Lookup of an unknown word
// returns UNK, never an error. Ids are dense and stable across save/load.
class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;

    Vocabulary();

    int add(const std::string& word);          // inserts if absent, returns id
    int id_of(const std::string& word) const;  // UNK for out-of-vocabulary
    const std::string& word_of(int id) const;
    bool contains(const std::string& word) const;
    std::size_t size() const { return words_.size(); }

    void add_all(const Dataset& dataset);

    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> ids_;
};

struct BilingualLexicon {
    std::string src_lang;
    std::string tgt_lang;
    // Source word -> translations, duplicates removed, file order preserved.
    std::unordered_map<std::string, std::vector<std::string>> entries;
    std::vector<std::string> key_order;  // insertion order, for deterministic dumps

    bool covers(const std::string& word) const { return entries.count(word) > 0; }
    const std::vector<std::string>& translations(const std::string& word) const;
    void add(const std::string& src, const std::string& tgt);
    std::size_t size() const { return entries.size(); }
};

// "label<TAB>text" per line, UTF-8, LF endings; an optional "label\ttext"
// header is skipped. Sentences are tokenized and truncated to max_seq_len.
Dataset load_dataset(const std::string& path, const std::string& lang,
                     std::size_t max_seq_len = 128);
void save_dataset(const Dataset& dataset, const std::string& path);

// MUSE convention: "source_word<whitespace>target_word" per line; repeated
// source words aggregate into one translation list.
BilingualLexicon load_muse_lexicon(const std::string& path, const std::string& src_lang,
                                   const std::string& tgt_lang);
void save_muse_lexicon(const BilingualLexicon& lexicon, const std::string& path);

}  // namespace pcs
