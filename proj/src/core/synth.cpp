#include "synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace pcs {
namespace {

const char* kLangPool[] = {"en", "de", "fr", "es", "it", "ja", "ko", "ru", "zh", "th"};
constexpr std::size_t kLangPoolSize = sizeof(kLangPool) / sizeof(kLangPool[0]);
const char* kMarker = "\xc2\xa7";  // UTF-8 section sign, survives tokenization

std::string lang_name(std::size_t index) {
    if (index < kLangPoolSize) return kLangPool[index];
    return "x" + std::to_string(index);
}

struct AbstractWord {
    std::string name;  // e.g. "c0w3" (class-0 content) or "fw7" (function)
    int content_class = -1;
    // surfaces[lang] has one entry, or two when polysemy fired for a target.
    std::map<std::string, std::vector<std::string>> surfaces;
};

std::string surface(const std::string& abstract, const std::string& lang, bool alt) {
    return abstract + (alt ? "b" : "") + kMarker + lang;
}

}  // namespace

bool is_content_surface(const std::string& token) { return !token.empty() && token[0] == 'c'; }
bool is_function_surface(const std::string& token) { return !token.empty() && token[0] == 'f'; }

void SynthConfig::validate() const {
    if (num_languages < 2) throw ConfigError("synth: need at least one target language");
    if (num_classes < 2) throw ConfigError("synth: need at least two classes");
    if (num_train < 1 || num_dev < 1 || num_test < 1)
        throw ConfigError("synth: dataset sizes must be >= 1");
    const std::size_t content_total = vocab_per_lang * 3 / 5;
    if (content_total / num_classes < 1 || vocab_per_lang - content_total < 1)
        throw ConfigError("synth: vocab_per_lang too small for the class count");
    if (!(p_poly >= 0.0 && p_poly <= 1.0) || !(func_coverage >= 0.0 && func_coverage <= 1.0) ||
        !(p_noise >= 0.0 && p_noise <= 1.0))
        throw ConfigError("synth: probabilities must lie in [0, 1]");
    if (content_min < 1 || content_max < content_min || func_max < func_min)
        throw ConfigError("synth: bad sentence length bounds");
}

SynthTask generate_synthetic_task(const SynthConfig& config, std::uint64_t seed) {
    config.validate();
    RngStream root(seed);

    SynthTask task;
    task.config = config;
    task.seed = seed;
    task.src_lang = lang_name(0);
    for (std::size_t i = 1; i < config.num_languages; ++i) task.tgt_langs.push_back(lang_name(i));

    // Abstract lexicon: ~60% content words split evenly across classes.
    const std::size_t content_total = config.vocab_per_lang * 3 / 5;
    const std::size_t content_per_class = content_total / config.num_classes;
    const std::size_t func_total = config.vocab_per_lang - content_per_class * config.num_classes;

    std::vector<AbstractWord> words;
    std::vector<std::vector<std::size_t>> content_by_class(config.num_classes);
    std::vector<std::size_t> function_words;
    for (std::size_t c = 0; c < config.num_classes; ++c)
        for (std::size_t i = 0; i < content_per_class; ++i) {
            AbstractWord w;
            w.name = "c" + std::to_string(c) + "w" + std::to_string(i);
            w.content_class = static_cast<int>(c);
            content_by_class[c].push_back(words.size());
            words.push_back(std::move(w));
        }
    for (std::size_t i = 0; i < func_total; ++i) {
        AbstractWord w;
        w.name = "fw" + std::to_string(i);
        function_words.push_back(words.size());
        words.push_back(std::move(w));
    }

    RngStream poly_rng = root.split("polysemy");
    for (AbstractWord& w : words) {
        w.surfaces[task.src_lang] = {surface(w.name, task.src_lang, false)};
        for (const std::string& lang : task.tgt_langs) {
            std::vector<std::string> forms = {surface(w.name, lang, false)};
            if (poly_rng.uniform() < config.p_poly) forms.push_back(surface(w.name, lang, true));
            w.surfaces[lang] = std::move(forms);
        }
    }

    // Dictionaries between the source and every target. Content words are
    // always covered; function-word coverage is a config knob. p_noise adds a
    // wrong candidate to an entry, standing in for the inexact translations
    // real MUSE dictionaries carry.
    RngStream cover_rng = root.split("coverage");
    RngStream noise_rng = root.split("dict_noise");
    for (const std::string& lang : task.tgt_langs) {
        BilingualLexicon lex;
        lex.src_lang = task.src_lang;
        lex.tgt_lang = lang;
        for (std::size_t wi = 0; wi < words.size(); ++wi) {
            const AbstractWord& w = words[wi];
            const bool covered =
                w.content_class >= 0 || cover_rng.uniform() < config.func_coverage;
            if (!covered) continue;
            for (const std::string& tgt : w.surfaces.at(lang))
                lex.add(w.surfaces.at(task.src_lang)[0], tgt);
            // Wrong candidates land on content entries and point at the
            // opposite class, so uncontrolled replacement of a label carrier
            // contradicts the label outright.
            if (w.content_class >= 0 && noise_rng.uniform() < config.p_noise) {
                const std::size_t other_class =
                    (static_cast<std::size_t>(w.content_class) + 1 +
                     noise_rng.index(config.num_classes - 1)) %
                    config.num_classes;
                const auto& pool = content_by_class[other_class];
                const std::size_t other = pool[noise_rng.index(pool.size())];
                lex.add(w.surfaces.at(task.src_lang)[0], words[other].surfaces.at(lang)[0]);
            }
        }
        task.lexicons.emplace(lang, std::move(lex));
    }

    auto make_sentence = [&](int label, const std::string& lang, RngStream& rng) {
        const std::size_t n_content =
            config.content_min + rng.index(config.content_max - config.content_min + 1);
        const std::size_t n_func = config.func_min + rng.index(config.func_max - config.func_min + 1);
        std::vector<std::size_t> picks;
        const auto& pool = content_by_class[static_cast<std::size_t>(label)];
        for (std::size_t i = 0; i < n_content; ++i) picks.push_back(pool[rng.index(pool.size())]);
        for (std::size_t i = 0; i < n_func; ++i)
            picks.push_back(function_words[rng.index(function_words.size())]);
        rng.shuffle(picks);
        Sentence s;
        for (std::size_t idx : picks) {
            const auto& forms = words[idx].surfaces.at(lang);
            s.tokens.push_back(forms[rng.index(forms.size())]);
            s.langs.push_back(lang);
        }
        return s;
    };

    auto make_split = [&](std::size_t count, const std::string& lang, const char* label_tag) {
        RngStream rng = root.split(std::string("split/") + label_tag + "/" + lang);
        Dataset out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            // Round-robin labels: class balance is exact by construction.
            const int label = static_cast<int>(i % config.num_classes);
            out.push_back({make_sentence(label, lang, rng), label});
        }
        return out;
    };

    task.train = make_split(config.num_train, task.src_lang, "train");
    task.dev = make_split(config.num_dev, task.src_lang, "dev");
    task.tests.emplace(task.src_lang, make_split(config.num_test, task.src_lang, "test"));
    for (const std::string& lang : task.tgt_langs)
        task.tests.emplace(lang, make_split(config.num_test, lang, "test"));
    return task;
}

void write_synthetic_task(const SynthTask& task, const std::string& dir) {
    fs::create_directories(dir);
    save_dataset(task.train, (fs::path(dir) / "train.tsv").string());
    save_dataset(task.dev, (fs::path(dir) / "dev.tsv").string());
    for (const auto& [lang, data] : task.tests)
        save_dataset(data, (fs::path(dir) / ("test." + lang + ".tsv")).string());
    for (const auto& [lang, lex] : task.lexicons)
        save_muse_lexicon(
            lex, (fs::path(dir) / ("dict." + task.src_lang + "-" + lang + ".txt")).string());

    nlohmann::json manifest;
    manifest["version"] = version_string();
    manifest["seed"] = task.seed;
    manifest["src_lang"] = task.src_lang;
    manifest["tgt_langs"] = task.tgt_langs;
    manifest["config"] = {{"num_languages", task.config.num_languages},
                          {"vocab_per_lang", task.config.vocab_per_lang},
                          {"num_train", task.config.num_train},
                          {"num_dev", task.config.num_dev},
                          {"num_test", task.config.num_test},
                          {"num_classes", task.config.num_classes},
                          {"p_poly", task.config.p_poly},
                          {"p_noise", task.config.p_noise},
                          {"func_coverage", task.config.func_coverage},
                          {"content_min", task.config.content_min},
                          {"content_max", task.config.content_max},
                          {"func_min", task.config.func_min},
                          {"func_max", task.config.func_max}};
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::trunc);
    if (!out) throw IoError("cannot write manifest in " + dir);
    out << manifest.dump(2) << "\n";
}

SynthTask load_synthetic_task(const std::string& dir, std::size_t max_seq_len) {
    const fs::path base(dir);
    std::ifstream in(base / "manifest.json");
    if (!in) throw IoError("no manifest.json in " + dir);
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad manifest in " + dir + ": " + e.what());
    }
    SynthTask task;
    task.seed = manifest.value("seed", 0ULL);
    task.src_lang = manifest.at("src_lang").get<std::string>();
    for (const auto& lang : manifest.at("tgt_langs"))
        task.tgt_langs.push_back(lang.get<std::string>());
    const auto& cfg = manifest.at("config");
    task.config.num_languages = cfg.at("num_languages").get<std::size_t>();
    task.config.vocab_per_lang = cfg.at("vocab_per_lang").get<std::size_t>();
    task.config.num_train = cfg.at("num_train").get<std::size_t>();
    task.config.num_dev = cfg.at("num_dev").get<std::size_t>();
    task.config.num_test = cfg.at("num_test").get<std::size_t>();
    task.config.num_classes = cfg.at("num_classes").get<std::size_t>();
    task.config.p_poly = cfg.at("p_poly").get<double>();
    task.config.p_noise = cfg.value("p_noise", 0.0);
    task.config.func_coverage = cfg.at("func_coverage").get<double>();

    task.train = load_dataset((base / "train.tsv").string(), task.src_lang, max_seq_len);
    task.dev = load_dataset((base / "dev.tsv").string(), task.src_lang, max_seq_len);
    const fs::path src_test = base / ("test." + task.src_lang + ".tsv");
    if (fs::exists(src_test))
        task.tests.emplace(task.src_lang,
                           load_dataset(src_test.string(), task.src_lang, max_seq_len));
    for (const std::string& lang : task.tgt_langs) {
        task.tests.emplace(
            lang, load_dataset((base / ("test." + lang + ".tsv")).string(), lang, max_seq_len));
        task.lexicons.emplace(
            lang,
            load_muse_lexicon((base / ("dict." + task.src_lang + "-" + lang + ".txt")).string(),
                              task.src_lang, lang));
    }
    return task;
}

}  // namespace pcs
