#include "simval/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "simval/error.hpp"
#include "simval/validators.hpp"

namespace simval {

Direction better_direction(ModelKind model) {
    return model == ModelKind::OC ? Direction::HigherIsBetter : Direction::LowerIsBetter;
}

Direction better_direction(const std::string &model) {
    const auto m = parse_model_kind(model);
    if (!m) throw DomainError("unknown model '" + model + "'");
    return better_direction(*m);
}

std::vector<double> rank_items(const std::vector<LabeledValue> &items, Direction direction) {
    std::vector<double> keys;
    keys.reserve(items.size());
    // Ranking the negated value in ascending order puts the largest first.
    for (const auto &[label, v] : items) keys.push_back(direction == Direction::HigherIsBetter ? -v : v);
    return average_ranks(keys);
}

std::vector<LabeledValue> ranked(const std::vector<LabeledValue> &items, Direction direction) {
    const auto ranks = rank_items(items, direction);
    std::vector<LabeledValue> out;
    for (std::size_t i = 0; i < items.size(); ++i) out.emplace_back(items[i].first, ranks[i]);
    return out;
}

RankingComparison compare_rankings(const std::vector<LabeledValue> &ranks_a, const std::vector<LabeledValue> &ranks_b) {
    std::map<std::string, double> a, b;
    for (const auto &[l, r] : ranks_a)
        if (!a.emplace(l, r).second) throw LabelMismatchError("duplicate label '" + l + "'");
    for (const auto &[l, r] : ranks_b)
        if (!b.emplace(l, r).second) throw LabelMismatchError("duplicate label '" + l + "'");
    std::vector<std::string> only_a, only_b;
    for (const auto &[l, r] : a)
        if (!b.count(l)) only_a.push_back(l);
    for (const auto &[l, r] : b)
        if (!a.count(l)) only_b.push_back(l);
    if (!only_a.empty() || !only_b.empty()) {
        std::string msg = "label sets differ;";
        if (!only_a.empty()) {
            msg += " only in first:";
            for (const auto &l : only_a) msg += " " + l;
            if (!only_b.empty()) msg += ";";
        }
        if (!only_b.empty()) {
            msg += " only in second:";
            for (const auto &l : only_b) msg += " " + l;
        }
        throw LabelMismatchError(msg);
    }

    RankingComparison c;
    for (const auto &[l, r] : ranks_a) {
        c.labels.push_back(l);
        c.ranks_a.push_back(r);
        c.ranks_b.push_back(b.at(l));
        c.deltas.push_back(b.at(l) - r);
    }
    if (c.labels.size() >= 2) c.correlation = spearman_rho(c.ranks_a, c.ranks_b);
    return c;
}

nlohmann::json to_json(const RankingComparison &c) {
    nlohmann::json items = nlohmann::json::array();
    for (std::size_t i = 0; i < c.labels.size(); ++i)
        items.push_back({{"label", c.labels[i]}, {"rank_a", c.ranks_a[i]}, {"rank_b", c.ranks_b[i]},
                         {"delta", c.deltas[i]}});
    nlohmann::json j = {{"items", items}};
    j["correlation"] = c.correlation ? nlohmann::json(*c.correlation) : nlohmann::json(nullptr);
    return j;
}

std::vector<LabeledValue> summarize_by(const Manifold &m, const std::string &by) {
    std::size_t axis = 0;
    bool is_context = by == "context", in_w = false;
    if (!is_context) {
        auto w = std::find(m.theta_w_names.begin(), m.theta_w_names.end(), by);
        auto v = std::find(m.theta_v_names.begin(), m.theta_v_names.end(), by);
        if (w != m.theta_w_names.end()) {
            in_w = true;
            axis = static_cast<std::size_t>(w - m.theta_w_names.begin());
        } else if (v != m.theta_v_names.end()) {
            axis = static_cast<std::size_t>(v - m.theta_v_names.begin());
        } else {
            throw DomainError("unknown grouping '" + by + "'");
        }
    }
    auto label_of = [&](const CriterionRecord &r) -> std::string {
        if (is_context) return r.context;
        const double x = in_w ? r.theta_w[axis] : r.theta_v[axis];
        if (by == "weather") {
            const double idx = std::round(x);
            if (idx == x && idx >= 0 && idx <= static_cast<double>(WeatherTag::MildHaze))
                return std::string(to_string(static_cast<WeatherTag>(static_cast<int>(idx))));
        }
        return format_number(x);
    };
    std::vector<std::string> order;
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto &r : m.records) {
        const auto l = label_of(r);
        auto [it, fresh] = acc.emplace(l, std::make_pair(0.0, std::size_t{0}));
        if (fresh) order.push_back(l);
        it->second.first += r.mean;
        ++it->second.second;
    }
    std::vector<LabeledValue> out;
    for (const auto &l : order) out.emplace_back(l, acc[l].first / static_cast<double>(acc[l].second));
    return out;
}

}  // namespace simval
