#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fresco/agent.hpp"
#include "fresco/datagen.hpp"
#include "fresco/env.hpp"
#include "fresco/federation.hpp"
#include "fresco/report.hpp"

namespace fresco {

struct HouseholdSpec {
    int household_id = 0;
    int microgrid_id = 0;
    PvConfig pv;
    LoadConfig load;
    BatteryConfig battery;
};

struct SplitConfig {
    std::vector<int> train;
    std::vector<int> validation;
    std::vector<int> test;
};

struct RunConfig {
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";
    int episode_steps = kStepsPerDay;
    int eval_days = 3;
    bool write_traces = false;
    RewardWeights weights;
    GridConfig grid;
    NetLayout layout;
    TrainConfig train;
    FederationConfig federation;
    std::vector<HouseholdSpec> households;
    SplitConfig split;

    void validate() const;
    const HouseholdSpec& household(int household_id) const;
};

RunConfig default_run_config();

HouseholdScenario scenario_for(const RunConfig& cfg, int household_id);
std::vector<HouseholdScenario> scenarios_for(const RunConfig& cfg,
                                             const std::vector<int>& household_ids);

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& cfg, const std::string& path);

}  // namespace fresco
