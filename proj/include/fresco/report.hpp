#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fresco {

struct RewardWeights {
    double price_weight = 1.0;
    double emission_weight = 1.0;

    void validate() const {
        if (price_weight < 0.0 || emission_weight < 0.0)
            throw std::invalid_argument("reward weights must be >= 0");
        if (price_weight == 0.0 && emission_weight == 0.0)
            throw std::invalid_argument("reward weights must not both be 0");
    }
};

struct StepRecord {
    int t = 0;
    double action = 0.0;
    double realized_action = 0.0;
    double soc = 0.0;  // state of charge after the step
    double grid_exchange = 0.0;
    double price = 0.0;
    double carbon = 0.0;
    double cost = 0.0;
    double emissions = 0.0;
    double reward = 0.0;
};

struct EpisodeReport {
    int household_id = -1;
    int microgrid_id = -1;
    std::uint64_t day_hash = 0;
    double total_reward = 0.0;
    double total_cost = 0.0;
    double total_emissions = 0.0;
    double price_score = 0.0;     // mean over steps of price_t * g_t
    double emission_score = 0.0;  // mean over steps of carbon_t * g_t
    std::vector<StepRecord> trace;

    int steps() const { return static_cast<int>(trace.size()); }
};

// CSV with header t,action,realized_action,soc,grid_exchange,price,carbon,cost,emissions,reward
std::string trace_to_csv(const std::vector<StepRecord>& trace);
std::vector<StepRecord> trace_from_csv(const std::string& csv_text);

}  // namespace fresco
