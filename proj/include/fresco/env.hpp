#pragma once

#include <array>
#include <functional>

#include "fresco/datagen.hpp"
#include "fresco/report.hpp"

namespace fresco {

struct BatteryConfig {
    double capacity = 1.0;
    double max_power = 0.25;  // energy per step at the household side
    double charge_efficiency = 0.9;
    double discharge_efficiency = 0.9;
    double initial_soc = 0.5;  // fraction of capacity

    void validate() const;
};

struct HouseholdScenario {
    int household_id = 0;
    int microgrid_id = 0;
    PvConfig pv;
    LoadConfig load;
    BatteryConfig battery;
};

struct EnvState {
    int t = 0;
    double soc = 0.0;
};

struct StepOutcome {
    EnvState next_state;
    double reward = 0.0;
    double grid_exchange = 0.0;  // positive = import
    double cost = 0.0;
    double emissions = 0.0;
    double realized_action = 0.0;
};

inline constexpr int kObservationDim = 7;
using Observation = std::array<double, kObservationDim>;

// Policies see the environment state plus the observation vector; the
// state is exposed so replay-style policies can index by step.
using PolicyFn = std::function<double(const EnvState&, const Observation&)>;

// Episodic single-household environment over one generated day.
// State is a value and step is a pure transition, so episodes can run
// concurrently without coordination.
class Environment {
public:
    Environment(HouseholdScenario scenario, DayData day);

    EnvState reset() const;

    // [sin(2*pi*t/24), cos(2*pi*t/24), soc/capacity, pv, load, price, carbon]
    Observation observe(const EnvState& state) const;

    // Charging stores min(p*eta_c, headroom); discharging delivers
    // min(|p|*eta_d, soc*eta_d) to the household side. Grid exchange is
    // load - pv + battery draw, priced symmetrically for import and export.
    StepOutcome step(const EnvState& state, double action, const RewardWeights& weights) const;

    EpisodeReport run_episode(const PolicyFn& policy, const RewardWeights& weights) const;

    int horizon() const { return day_.steps(); }
    const DayData& day() const { return day_; }
    const HouseholdScenario& scenario() const { return scenario_; }

private:
    HouseholdScenario scenario_;
    DayData day_;
};

// Finishes an EpisodeReport from an accumulated trace: totals plus the
// per-step mean price/emission scores.
EpisodeReport summarize_trace(const HouseholdScenario& scenario, std::uint64_t day_hash,
                              std::vector<StepRecord> trace);

}  // namespace fresco
