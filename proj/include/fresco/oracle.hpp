#pragma once

#include <string>
#include <vector>

#include "fresco/env.hpp"

namespace fresco {

struct DispatchProblem {
    DayData day;
    BatteryConfig battery;
    RewardWeights weights;

    void validate() const;
};

struct DispatchSolution {
    std::vector<double> charge;     // grid-side energy into charging, >= 0
    std::vector<double> discharge;  // household-side energy delivered, >= 0
    std::vector<double> soc;        // length T+1, soc[0] = initial
    std::vector<double> equivalent_actions;  // in [-1,1], reproduce (c,d) through env::step
    double objective = 0.0;  // total weighted cost + emissions over the day
};

// Perfect-foresight dispatch as an exact linear program, solved by the
// bundled dense simplex. Minimizes
//   sum_t (w_p*price_t + w_e*carbon_t) * (load_t - pv_t + c_t - d_t)
// subject to the battery dynamics and power limits. A c = d = 0 plan is
// always feasible, so solver infeasibility indicates an internal error.
DispatchSolution solve_lp(const DispatchProblem& problem);

// Independent cross-check: backward dynamic programming over a state
// grid of soc levels, transitions snapped to grid-reachable targets.
// The exact initial soc is kept as a level, so idling is feasible at
// any grid size. Upper-bounds the LP objective and converges to it as
// the grid refines.
DispatchSolution solve_dp(const DispatchProblem& problem, int soc_grid_points);

// Replays a solution's equivalent actions through the environment and
// verifies that the per-step grid exchange matches the solution's within
// tolerance; a mismatch means the oracle and env accounting disagree.
EpisodeReport replay(const DispatchSolution& solution, const HouseholdScenario& scenario,
                     const DayData& day, const RewardWeights& weights, double tol = 1e-9);

// CSV with header t,charge,discharge,soc,action,price,carbon,step_cost
// (soc is the level after the step; step_cost is the weighted step cost).
std::string solution_to_csv(const DispatchSolution& solution, const DayData& day,
                            const RewardWeights& weights);

}  // namespace fresco
