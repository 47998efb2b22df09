#include "relevance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace pcs {

std::string to_string(Reduction r) { return r == Reduction::SumAbs ? "sum_abs" : "sum"; }
std::string to_string(MeasurerKind k) { return k == MeasurerKind::Lrp ? "lrp" : "gradient"; }

Reduction reduction_from_string(const std::string& s) {
    if (s == "sum_abs") return Reduction::SumAbs;
    if (s == "sum") return Reduction::Sum;
    throw ConfigError("unknown reduction: " + s);
}

MeasurerKind measurer_from_string(const std::string& s) {
    if (s == "lrp") return MeasurerKind::Lrp;
    if (s == "gradient") return MeasurerKind::Gradient;
    throw ConfigError("unknown measurer: " + s);
}

namespace {

double reduce_row(std::span<const double> row, Reduction reduction) {
    double acc = 0.0;
    if (reduction == Reduction::SumAbs)
        for (double v : row) acc += std::fabs(v);
    else
        for (double v : row) acc += v;
    return acc;
}

}  // namespace

RelevanceProfile measure_lrp(const ModelParams& params, const TokenizedExample& example,
                             std::size_t example_index, Reduction reduction, double epsilon) {
    ForwardTrace trace = forward(params, example.tokens, false, nullptr);
    LrpResult lrp = lrp_relevance(params, trace, static_cast<std::size_t>(example.label), epsilon);
    RelevanceProfile profile;
    profile.example_index = example_index;
    profile.target_class = example.label;
    profile.reduction = reduction;
    profile.kind = MeasurerKind::Lrp;
    profile.scores.reserve(example.tokens.size());
    for (std::size_t i = 0; i < example.tokens.size(); ++i)
        profile.scores.push_back(reduce_row(lrp.token_relevance.row(i), reduction));
    return profile;
}

RelevanceProfile measure_gradient(const ModelParams& params, const TokenizedExample& example,
                                  std::size_t example_index, Reduction reduction) {
    ForwardTrace trace = forward(params, example.tokens, false, nullptr);
    const std::size_t C = params.config.num_classes;
    const std::size_t target = static_cast<std::size_t>(example.label);
    // d(p_target)/d(logit_j) = p_target * (delta_jt - p_j)
    std::vector<double> dlogits(C);
    const double pt = trace.probs[target];
    for (std::size_t j = 0; j < C; ++j) dlogits[j] = pt * ((j == target ? 1.0 : 0.0) - trace.probs[j]);
    Matrix dx0 = backward_from_logits(params, trace, dlogits, nullptr);

    RelevanceProfile profile;
    profile.example_index = example_index;
    profile.target_class = example.label;
    profile.reduction = reduction;
    profile.kind = MeasurerKind::Gradient;
    profile.scores.reserve(example.tokens.size());
    const std::size_t d = params.config.embed_dim;
    for (std::size_t i = 0; i < example.tokens.size(); ++i) {
        // Gradient times the token embedding itself (positions excluded, so a
        // zero embedding row really scores zero).
        const double* erow =
            params.embedding.row_ptr(static_cast<std::size_t>(example.tokens[i]));
        double acc = 0.0;
        if (reduction == Reduction::SumAbs)
            for (std::size_t c = 0; c < d; ++c) acc += std::fabs(dx0.at(i, c) * erow[c]);
        else
            for (std::size_t c = 0; c < d; ++c) acc += dx0.at(i, c) * erow[c];
        profile.scores.push_back(acc);
    }
    return profile;
}

std::vector<std::size_t> rank_ascending(const RelevanceProfile& profile,
                                        const std::vector<std::size_t>& eligible) {
    std::vector<std::size_t> order = eligible;
    for (std::size_t idx : order)
        if (idx >= profile.scores.size())
            throw DataError("rank_ascending: eligible index out of range");
    std::sort(order.begin(), order.end(), [&profile](std::size_t a, std::size_t b) {
        if (profile.scores[a] != profile.scores[b]) return profile.scores[a] < profile.scores[b];
        return a < b;
    });
    return order;
}

void save_profiles(const std::vector<RelevanceProfile>& profiles, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write profile cache: " + path);
    for (const RelevanceProfile& p : profiles) {
        nlohmann::json row = {{"example_id", p.example_index},
                              {"class", p.target_class},
                              {"reduction", to_string(p.reduction)},
                              {"scores", p.scores}};
        out << row.dump() << "\n";
    }
    if (!out) throw IoError("failed writing profile cache: " + path);
}

std::vector<RelevanceProfile> load_profiles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read profile cache: " + path);
    std::vector<RelevanceProfile> profiles;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": bad profile record: " +
                            e.what());
        }
        RelevanceProfile p;
        p.example_index = row.at("example_id").get<std::size_t>();
        p.target_class = row.at("class").get<int>();
        p.reduction = reduction_from_string(row.at("reduction").get<std::string>());
        p.scores = row.at("scores").get<std::vector<double>>();
        profiles.push_back(std::move(p));
    }
    return profiles;
}

}  // namespace pcs
