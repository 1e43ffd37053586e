#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fresco/agent.hpp"

namespace fresco {

// Purposes for seed derivation. Every random stream in the pipeline is
// derived from the master seed through one of these, so no stream
// depends on scheduling or on unrelated configuration.
enum SeedPurpose : std::uint64_t {
    kSeedInit = 1,          // network initialization
    kSeedDataDay = 2,       // cmd_generate dataset days
    kSeedTrainDay = 3,      // training episode days
    kSeedTrainActions = 4,  // per-client action sampling
    kSeedValDay = 5,        // validation days per round
    kSeedEvalDay = 6,       // evaluation days shared across arms
};

struct FederationConfig {
    int sync_interval = 200;  // episodes between synchronizations
    int rounds = 5;
    // Per-client weights; empty means uniform.
    std::vector<double> client_weights;

    void validate() const;
};

struct ClientState {
    int client_id = 0;
    AgentParams params;
    int episodes_completed = 0;
    HouseholdScenario scenario;
};

// Weighted elementwise mean of the actor and critic vectors. Identical
// inputs are returned unchanged, so averaging a single client or a
// fully synchronized fleet is exact.
AgentParams fed_avg(const std::vector<AgentParams>& params_list, const std::vector<double>& weights);

struct RoundLogRow {
    int round = 0;
    int client_id = 0;
    std::string split;  // "train" or "validation"
    double mean_reward = 0.0;
    double price_score = 0.0;
    double emission_score = 0.0;
};

std::string round_log_to_csv(const std::vector<RoundLogRow>& rows);

struct TrainingSetup {
    std::vector<HouseholdScenario> train_scenarios;
    std::vector<HouseholdScenario> validation_scenarios;
    GridConfig grid;
    int episode_steps = kStepsPerDay;
    RewardWeights weights;
    NetLayout layout;
};

struct TrainingOutcome {
    // Federated: the last synchronized average. Isolated: the first
    // client's params (per-client results are in `clients`).
    AgentParams final_params;
    std::vector<ClientState> clients;
    std::vector<RoundLogRow> round_log;
    int aborted_round = -1;  // >= 0 if a round was rolled back
    std::string error;
};

// Called after each completed round with the synchronized params
// (federated) or the per-client params (isolated).
using RoundCallback = std::function<void(int round, const std::vector<ClientState>& clients,
                                         const AgentParams* average)>;

// Each round, every client trains sync_interval episodes on fresh
// generated days, then all params are replaced by their weighted
// average (barrier semantics; clients within a round run in parallel).
// Client randomness derives only from (master_seed, client_id, round),
// so results are independent of execution order. A client failure rolls
// every client back to the last average and stops training.
TrainingOutcome run_federated_training(const TrainingSetup& setup, const TrainConfig& train_cfg,
                                       const FederationConfig& fed_cfg, std::uint64_t master_seed,
                                       const RoundCallback& on_round = nullptr);

// The same loop with the averaging step skipped.
TrainingOutcome run_isolated_training(const TrainingSetup& setup, const TrainConfig& train_cfg,
                                      const FederationConfig& fed_cfg, std::uint64_t master_seed,
                                      const RoundCallback& on_round = nullptr);

}  // namespace fresco
