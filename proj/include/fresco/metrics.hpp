#pragma once

#include <array>
#include <string>
#include <vector>

#include "fresco/report.hpp"

namespace fresco {

enum class AggregationLevel { Household, Microgrid, Distributor };

const char* to_string(AggregationLevel level);

// Price/carbon improvement of a treated run over its base run, both on
// the identical day realization. Positive means the treated run
// improved.
struct DeltaReport {
    AggregationLevel level = AggregationLevel::Household;
    int household_id = -1;  // -1 above household level
    int microgrid_id = -1;  // -1 at distributor level
    double p_delta = 0.0;
    double c_delta = 0.0;
};

struct EpisodeScores {
    double price_score = 0.0;
    double emission_score = 0.0;
    double mean_reward = 0.0;
};

// Per-step means over a complete trace: price_score = (1/T) sum price_t*g_t,
// emission_score likewise, mean_reward = -(w_p*price_score + w_e*emission_score).
EpisodeScores score_episode(const std::vector<StepRecord>& trace, const RewardWeights& weights);

// P_delta = base.price_score - treated.price_score (and the carbon
// counterpart). Requires the same household and day realization.
DeltaReport delta(const EpisodeReport& base, const EpisodeReport& treated);

// Household deltas pass through; microgrid level means per microgrid_id
// (one report per microgrid, ordered by id); distributor level means
// over all households (one report).
std::vector<DeltaReport> aggregate(const std::vector<DeltaReport>& household_deltas,
                                   AggregationLevel level);

std::string deltas_to_csv(const std::vector<DeltaReport>& deltas);

// Scores for one comparison arm, split into train and test households.
struct ArmReports {
    std::vector<EpisodeReport> train;
    std::vector<EpisodeReport> test;
};

// Score table over the three arms: the dispatch oracle, per-household
// training without synchronization, and federated training. Rows are
// household means; the test reward row is omitted to keep the familiar
// five-row layout, and test rows are dropped entirely when the test
// set is empty.
struct ComparisonTable {
    std::vector<std::string> row_labels;
    std::array<std::string, 3> arm_labels{"oracle", "a2c_isolated", "fedavg"};
    std::vector<std::array<double, 3>> values;

    std::string to_csv() const;
    std::string to_text() const;
};

ComparisonTable comparison_table(const ArmReports& oracle, const ArmReports& isolated,
                                 const ArmReports& federated);

}  // namespace fresco
