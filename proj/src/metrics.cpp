#include "fresco/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fresco/csv.hpp"

namespace fresco {

const char* to_string(AggregationLevel level) {
    switch (level) {
        case AggregationLevel::Household: return "household";
        case AggregationLevel::Microgrid: return "microgrid";
        case AggregationLevel::Distributor: return "distributor";
    }
    throw std::invalid_argument("unknown aggregation level");
}

EpisodeScores score_episode(const std::vector<StepRecord>& trace, const RewardWeights& weights) {
    weights.validate();
    if (trace.empty()) throw std::invalid_argument("score_episode: empty trace");
    for (size_t i = 0; i < trace.size(); ++i)
        if (trace[i].t != static_cast<int>(i))
            throw std::invalid_argument("score_episode: incomplete trace");
    const double n = static_cast<double>(trace.size());
    EpisodeScores s;
    for (const StepRecord& r : trace) {
        s.price_score += r.price * r.grid_exchange;
        s.emission_score += r.carbon * r.grid_exchange;
    }
    s.price_score /= n;
    s.emission_score /= n;
    s.mean_reward = -(weights.price_weight * s.price_score + weights.emission_weight * s.emission_score);
    return s;
}

DeltaReport delta(const EpisodeReport& base, const EpisodeReport& treated) {
    if (base.household_id != treated.household_id)
        throw std::invalid_argument("delta: reports are for different households");
    if (base.day_hash != treated.day_hash)
        throw std::invalid_argument("delta: reports are for different day realizations");
    DeltaReport d;
    d.level = AggregationLevel::Household;
    d.household_id = base.household_id;
    d.microgrid_id = base.microgrid_id;
    d.p_delta = base.price_score - treated.price_score;
    d.c_delta = base.emission_score - treated.emission_score;
    return d;
}

std::vector<DeltaReport> aggregate(const std::vector<DeltaReport>& household_deltas,
                                   AggregationLevel level) {
    if (household_deltas.empty()) throw std::invalid_argument("aggregate: empty delta set");
    for (const DeltaReport& d : household_deltas)
        if (d.level != AggregationLevel::Household)
            throw std::invalid_argument("aggregate: inputs must be household-level deltas");

    if (level == AggregationLevel::Household) return household_deltas;

    if (level == AggregationLevel::Microgrid) {
        std::map<int, std::pair<DeltaReport, int>> groups;
        for (const DeltaReport& d : household_deltas) {
            auto& [acc, count] = groups[d.microgrid_id];
            acc.p_delta += d.p_delta;
            acc.c_delta += d.c_delta;
            ++count;
        }
        std::vector<DeltaReport> out;
        for (auto& [mg, entry] : groups) {
            DeltaReport d;
            d.level = AggregationLevel::Microgrid;
            d.microgrid_id = mg;
            d.p_delta = entry.first.p_delta / entry.second;
            d.c_delta = entry.first.c_delta / entry.second;
            out.push_back(d);
        }
        return out;
    }

    DeltaReport d;
    d.level = AggregationLevel::Distributor;
    for (const DeltaReport& h : household_deltas) {
        d.p_delta += h.p_delta;
        d.c_delta += h.c_delta;
    }
    d.p_delta /= household_deltas.size();
    d.c_delta /= household_deltas.size();
    return {d};
}

std::string deltas_to_csv(const std::vector<DeltaReport>& deltas) {
    std::ostringstream out;
    out << "level,household_id,microgrid_id,p_delta,c_delta\n";
    for (const DeltaReport& d : deltas) {
        out << to_string(d.level) << ',' << d.household_id << ',' << d.microgrid_id << ','
            << fmt_fixed(d.p_delta, 6) << ',' << fmt_fixed(d.c_delta, 6) << '\n';
    }
    return out.str();
}

namespace {

// Reports must cover the same (household, day) pairs in every arm.
void check_pairing(const std::vector<EpisodeReport>& a, const std::vector<EpisodeReport>& b,
                   const char* what) {
    auto key = [](const std::vector<EpisodeReport>& v) {
        std::vector<std::pair<int, std::uint64_t>> k;
        k.reserve(v.size());
        for (const EpisodeReport& r : v) k.emplace_back(r.household_id, r.day_hash);
        std::sort(k.begin(), k.end());
        return k;
    };
    if (key(a) != key(b))
        throw std::invalid_argument(std::string("comparison_table: ") + what +
                                    " arms cover different (household, day) pairs");
}

double mean_of(const std::vector<EpisodeReport>& reports, double (*f)(const EpisodeReport&)) {
    double s = 0.0;
    for (const EpisodeReport& r : reports) s += f(r);
    return s / static_cast<double>(reports.size());
}

double reward_per_step(const EpisodeReport& r) {
    return r.steps() > 0 ? r.total_reward / r.steps() : 0.0;
}

}  // namespace

ComparisonTable comparison_table(const ArmReports& oracle, const ArmReports& isolated,
                                 const ArmReports& federated) {
    if (oracle.train.empty()) throw std::invalid_argument("comparison_table: no train reports");
    check_pairing(oracle.train, isolated.train, "train");
    check_pairing(oracle.train, federated.train, "train");
    check_pairing(oracle.test, isolated.test, "test");
    check_pairing(oracle.test, federated.test, "test");

    const std::array<const ArmReports*, 3> arms = {&oracle, &isolated, &federated};
    ComparisonTable table;
    auto add_row = [&](const std::string& label, bool test_split,
                       double (*f)(const EpisodeReport&)) {
        std::array<double, 3> row{};
        for (size_t i = 0; i < arms.size(); ++i)
            row[i] = mean_of(test_split ? arms[i]->test : arms[i]->train, f);
        table.row_labels.push_back(label);
        table.values.push_back(row);
    };

    add_row("train_reward", false, reward_per_step);
    add_row("train_price_score", false, [](const EpisodeReport& r) { return r.price_score; });
    add_row("train_emission_score", false, [](const EpisodeReport& r) { return r.emission_score; });
    if (!oracle.test.empty()) {
        add_row("test_price_score", true, [](const EpisodeReport& r) { return r.price_score; });
        add_row("test_emission_score", true, [](const EpisodeReport& r) { return r.emission_score; });
    }
    return table;
}

std::string ComparisonTable::to_csv() const {
    std::ostringstream out;
    out << "metric";
    for (const auto& arm : arm_labels) out << ',' << arm;
    out << '\n';
    for (size_t i = 0; i < row_labels.size(); ++i) {
        out << row_labels[i];
        for (double v : values[i]) out << ',' << fmt_fixed(v, 6);
        out << '\n';
    }
    return out.str();
}

std::string ComparisonTable::to_text() const {
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-24s %14s %14s %14s\n", "", arm_labels[0].c_str(),
                  arm_labels[1].c_str(), arm_labels[2].c_str());
    out << buf;
    for (size_t i = 0; i < row_labels.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%-24s %14.4f %14.4f %14.4f\n", row_labels[i].c_str(),
                      values[i][0], values[i][1], values[i][2]);
        out << buf;
    }
    return out.str();
}

}  // namespace fresco
