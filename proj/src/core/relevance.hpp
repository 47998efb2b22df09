#pragma once

#include <string>
#include <vector>

#include "model.hpp"

namespace pcs {

enum class Reduction { SumAbs, Sum };
enum class MeasurerKind { Lrp, Gradient };

std::string to_string(Reduction r);
std::string to_string(MeasurerKind k);
Reduction reduction_from_string(const std::string& s);
MeasurerKind measurer_from_string(const std::string& s);

// Per-token difficulty signal for one example w.r.t. one class.
struct RelevanceProfile {
    std::size_t example_index = 0;
    int target_class = 0;
    Reduction reduction = Reduction::Sum;
    MeasurerKind kind = MeasurerKind::Lrp;
    std::vector<double> scores;
};

// LRP relevance of each token toward the example's gold label, reduced over
// embedding dimensions. The signed sum is the default; the absolute sum sits
// behind the flag (it scores magnitude rather than class support and ranks
// label carriers noticeably worse).
RelevanceProfile measure_lrp(const ModelParams& params, const TokenizedExample& example,
                             std::size_t example_index, Reduction reduction = Reduction::Sum,
                             double epsilon = 1e-9);

// Gradient-times-input saliency at the embedding layer, same reduction.
RelevanceProfile measure_gradient(const ModelParams& params, const TokenizedExample& example,
                                  std::size_t example_index,
                                  Reduction reduction = Reduction::Sum);

// Eligible indices ordered by score ascending; ties break by position.
std::vector<std::size_t> rank_ascending(const RelevanceProfile& profile,
                                        const std::vector<std::size_t>& eligible);

// JSON-lines cache: {example_id, class, reduction, scores[]} per record.
void save_profiles(const std::vector<RelevanceProfile>& profiles, const std::string& path);
std::vector<RelevanceProfile> load_profiles(const std::string& path);

}  // namespace pcs
