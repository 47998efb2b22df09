#include "corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pcs {
namespace {

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// ASCII-only on purpose: multibyte UTF-8 sequences pass through untouched.
bool is_ascii_punct(char c) {
    const unsigned char u = static_cast<unsigned char>(c);
    return (u >= '!' && u <= '/') || (u >= ':' && u <= '@') || (u >= '[' && u <= '`') ||
           (u >= '{' && u <= '~');
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string clean_token(const std::string& raw) {
    std::size_t begin = 0, end = raw.size();
    while (begin < end && is_ascii_punct(raw[begin])) ++begin;
    while (end > begin && is_ascii_punct(raw[end - 1])) --end;
    std::string out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(ascii_lower(raw[i]));
    return out;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ascii_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_ascii_space(text[i])) ++i;
        if (i > start) {
            std::string tok = clean_token(text.substr(start, i - start));
            if (!tok.empty()) tokens.push_back(std::move(tok));
        }
    }
    return tokens;
}

Vocabulary::Vocabulary() {
    words_ = {"<pad>", "<unk>"};
    ids_ = {{"<pad>", kPad}, {"<unk>", kUnk}};
}

int Vocabulary::add(const std::string& word) {
    auto it = ids_.find(word);
    if (it != ids_.end()) return it->second;
    const int id = static_cast<int>(words_.size());
    words_.push_back(word);
    ids_.emplace(word, id);
    return id;
}

int Vocabulary::id_of(const std::string& word) const {
    auto it = ids_.find(word);
    return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::word_of(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= words_.size())
        throw DataError("vocabulary: id out of range: " + std::to_string(id));
    return words_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(const std::string& word) const { return ids_.count(word) > 0; }

void Vocabulary::add_all(const Dataset& dataset) {
    for (const LabeledExample& ex : dataset)
        for (const std::string& t : ex.sentence.tokens) add(t);
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write vocabulary: " + path);
    // Reserved ids included so the file alone reconstructs the table.
    for (const std::string& w : words_) out << w << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read vocabulary: " + path);
    Vocabulary vocab;
    std::string line;
    int idx = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (idx < 2) {
            // PAD/UNK rows; positions are fixed by construction.
        } else {
            vocab.add(line);
        }
        ++idx;
    }
    return vocab;
}

const std::vector<std::string>& BilingualLexicon::translations(const std::string& word) const {
    auto it = entries.find(word);
    if (it == entries.end())
        throw DataError("lexicon " + src_lang + "-" + tgt_lang + ": no entry for '" + word + "'");
    return it->second;
}

void BilingualLexicon::add(const std::string& src, const std::string& tgt) {
    auto [it, inserted] = entries.try_emplace(src);
    if (inserted) key_order.push_back(src);
    auto& list = it->second;
    if (std::find(list.begin(), list.end(), tgt) == list.end()) list.push_back(tgt);
}

Dataset load_dataset(const std::string& path, const std::string& lang, std::size_t max_seq_len) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read dataset: " + path);
    Dataset dataset;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && (line == "label\ttext")) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(path + ":" + std::to_string(line_no) + ": missing tab separator");
        const std::string label_str = line.substr(0, tab);
        int label = 0;
        try {
            std::size_t consumed = 0;
            label = std::stoi(label_str, &consumed);
            if (consumed != label_str.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(line_no) + ": bad label '" + label_str +
                            "'");
        }
        if (label < 0)
            throw DataError(path + ":" + std::to_string(line_no) + ": negative label");
        LabeledExample ex;
        ex.label = label;
        ex.sentence.tokens = tokenize(line.substr(tab + 1));
        if (ex.sentence.tokens.empty())
            throw DataError(path + ":" + std::to_string(line_no) + ": empty sentence");
        if (ex.sentence.tokens.size() > max_seq_len) ex.sentence.tokens.resize(max_seq_len);
        ex.sentence.langs.assign(ex.sentence.tokens.size(), lang);
        dataset.push_back(std::move(ex));
    }
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write dataset: " + path);
    for (const LabeledExample& ex : dataset) {
        out << ex.label << '\t';
        for (std::size_t i = 0; i < ex.sentence.tokens.size(); ++i) {
            if (i) out << ' ';
            out << ex.sentence.tokens[i];
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing dataset: " + path);
}

BilingualLexicon load_muse_lexicon(const std::string& path, const std::string& src_lang,
                                   const std::string& tgt_lang) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read lexicon: " + path);
    BilingualLexicon lex;
    lex.src_lang = src_lang;
    lex.tgt_lang = tgt_lang;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string src, tgt, extra;
        fields >> src >> tgt;
        if (src.empty() || tgt.empty() || (fields >> extra))
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected exactly two fields");
        std::transform(src.begin(), src.end(), src.begin(), ascii_lower);
        std::transform(tgt.begin(), tgt.end(), tgt.begin(), ascii_lower);
        lex.add(src, tgt);
    }
    return lex;
}

void save_muse_lexicon(const BilingualLexicon& lexicon, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write lexicon: " + path);
    for (const std::string& key : lexicon.key_order)
        for (const std::string& tgt : lexicon.entries.at(key)) out << key << ' ' << tgt << '\n';
    if (!out) throw IoError("failed writing lexicon: " + path);
}

}  // namespace pcs
