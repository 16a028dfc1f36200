#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "simval/manifold.hpp"
#include "simval/protocol.hpp"

namespace simval {

enum class Direction : std::uint8_t { HigherIsBetter, LowerIsBetter };

/// Correlations are better high; variances and angular errors are better low.
Direction better_direction(ModelKind model);
Direction better_direction(const std::string &model);

using LabeledValue = std::pair<std::string, double>;

/// Rank 1 is the best item; ties share the average rank.
std::vector<double> rank_items(const std::vector<LabeledValue> &items, Direction direction);

struct RankingComparison {
    std::vector<std::string> labels;  // in the order of the first ranking
    std::vector<double> ranks_a;
    std::vector<double> ranks_b;
    std::optional<double> correlation;  // Spearman rho of the two rank vectors
    std::vector<double> deltas;         // ranks_b - ranks_a
};

/// Compares two labelled rank vectors. Throws LabelMismatchError listing the
/// symmetric difference when the label sets differ.
RankingComparison compare_rankings(const std::vector<LabeledValue> &ranks_a,
                                   const std::vector<LabeledValue> &ranks_b);

nlohmann::json to_json(const RankingComparison &c);

/// Mean of mean_E per group. `by` is "context" or a theta_w / theta_v axis
/// name; weather indices are reported by name.
std::vector<LabeledValue> summarize_by(const Manifold &m, const std::string &by);

/// Labels paired with their ranks, for compare_rankings.
std::vector<LabeledValue> ranked(const std::vector<LabeledValue> &items, Direction direction);

}  // namespace simval
