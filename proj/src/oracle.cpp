#include "fresco/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fresco/csv.hpp"
#include "fresco/lp.hpp"

namespace fresco {

namespace {

std::vector<double> weighted_rates(const DayData& day, const RewardWeights& w) {
    std::vector<double> lambda(day.steps());
    for (int t = 0; t < day.steps(); ++t)
        lambda[t] = w.price_weight * day.price[t] + w.emission_weight * day.carbon[t];
    return lambda;
}

// Removes simultaneous charge/discharge while keeping the soc path
// fixed; never increases the objective when the rates are nonnegative.
void enforce_complementarity(std::vector<double>& c, std::vector<double>& d,
                             const BatteryConfig& bat) {
    for (size_t t = 0; t < c.size(); ++t) {
        if (c[t] > 0.0 && d[t] > 0.0) {
            double k = bat.charge_efficiency * bat.discharge_efficiency;
            double alpha = std::min(c[t], d[t] / k);
            c[t] -= alpha;
            d[t] -= alpha * k;
            if (c[t] < 1e-15) c[t] = 0.0;
            if (d[t] < 1e-15) d[t] = 0.0;
        }
    }
}

DispatchSolution package(const DispatchProblem& p, std::vector<double> c, std::vector<double> d) {
    const int T = p.day.steps();
    const BatteryConfig& bat = p.battery;
    enforce_complementarity(c, d, bat);

    DispatchSolution sol;
    sol.charge = std::move(c);
    sol.discharge = std::move(d);
    sol.soc.resize(T + 1);
    sol.soc[0] = bat.initial_soc * bat.capacity;
    sol.equivalent_actions.resize(T);
    std::vector<double> lambda = weighted_rates(p.day, p.weights);
    sol.objective = 0.0;
    for (int t = 0; t < T; ++t) {
        sol.soc[t + 1] = sol.soc[t] + bat.charge_efficiency * sol.charge[t] -
                         sol.discharge[t] / bat.discharge_efficiency;
        double g = p.day.load[t] - p.day.pv[t] + sol.charge[t] - sol.discharge[t];
        sol.objective += lambda[t] * g;
        double a = sol.charge[t] > 0.0
                       ? sol.charge[t] / bat.max_power
                       : -sol.discharge[t] / (bat.max_power * bat.discharge_efficiency);
        sol.equivalent_actions[t] = std::clamp(a, -1.0, 1.0);
    }
    return sol;
}

}  // namespace

void DispatchProblem::validate() const {
    battery.validate();
    weights.validate();
    if (day.steps() < 1) throw std::invalid_argument("dispatch: empty day");
    if (static_cast<int>(day.load.size()) != day.steps() ||
        static_cast<int>(day.price.size()) != day.steps() ||
        static_cast<int>(day.carbon.size()) != day.steps())
        throw std::invalid_argument("dispatch: day series must be aligned");
}

DispatchSolution solve_lp(const DispatchProblem& problem) {
    problem.validate();
    const int T = problem.day.steps();
    const BatteryConfig& bat = problem.battery;
    const double soc0 = bat.initial_soc * bat.capacity;
    std::vector<double> lambda = weighted_rates(problem.day, problem.weights);

    // Variables x = [c_0..c_{T-1}, d_0..d_{T-1}]; maximize
    // sum lambda_t (d_t - c_t), i.e. minimize the battery's cost term.
    const int n = 2 * T;
    const int m = 4 * T;
    std::vector<std::vector<double>> A(m, std::vector<double>(n, 0.0));
    std::vector<double> b(m, 0.0);
    std::vector<double> c(n, 0.0);
    for (int t = 0; t < T; ++t) {
        c[t] = -lambda[t];
        c[T + t] = lambda[t];
    }
    for (int t = 0; t < T; ++t) {
        // soc after step t stays within [0, capacity]:
        //   sum_{k<=t} (eta_c c_k - d_k/eta_d) <= capacity - soc0
        //  -sum_{k<=t} (eta_c c_k - d_k/eta_d) <= soc0
        for (int k = 0; k <= t; ++k) {
            A[t][k] = bat.charge_efficiency;
            A[t][T + k] = -1.0 / bat.discharge_efficiency;
            A[T + t][k] = -bat.charge_efficiency;
            A[T + t][T + k] = 1.0 / bat.discharge_efficiency;
        }
        b[t] = bat.capacity - soc0;
        b[T + t] = soc0;
        // Power limits.
        A[2 * T + t][t] = 1.0;
        b[2 * T + t] = bat.max_power;
        A[3 * T + t][T + t] = 1.0;
        b[3 * T + t] = bat.max_power * bat.discharge_efficiency;
    }

    LpResult lp = simplex_maximize(A, b, c, 1e-9);
    if (lp.status != LpResult::Status::Optimal)
        throw std::runtime_error("dispatch LP failed to reach optimality (internal error)");

    std::vector<double> charge(T), discharge(T);
    for (int t = 0; t < T; ++t) {
        charge[t] = std::max(0.0, std::min(lp.x[t], bat.max_power));
        discharge[t] = std::max(0.0, std::min(lp.x[T + t], bat.max_power * bat.discharge_efficiency));
    }
    return package(problem, std::move(charge), std::move(discharge));
}

DispatchSolution solve_dp(const DispatchProblem& problem, int soc_grid_points) {
    problem.validate();
    if (soc_grid_points < 2) throw std::invalid_argument("solve_dp: need at least 2 grid points");
    const int T = problem.day.steps();
    const BatteryConfig& bat = problem.battery;
    const double q = bat.capacity / (soc_grid_points - 1);
    const double soc0 = bat.initial_soc * bat.capacity;

    // The levels are the uniform grid plus the exact initial soc, so
    // idling is always representable and every plan the DP can express
    // is feasible for the continuous problem (hence DP >= LP).
    std::vector<double> levels(soc_grid_points);
    for (int i = 0; i < soc_grid_points; ++i) levels[i] = i * q;
    if (std::find(levels.begin(), levels.end(), soc0) == levels.end()) {
        levels.push_back(soc0);
        std::sort(levels.begin(), levels.end());
    }
    const int N = static_cast<int>(levels.size());
    const int start = static_cast<int>(
        std::find(levels.begin(), levels.end(), soc0) - levels.begin());

    std::vector<double> lambda = weighted_rates(problem.day, problem.weights);
    constexpr double kInf = std::numeric_limits<double>::infinity();
    constexpr double kSlack = 1e-12;

    // Transition between exact levels; infeasible moves return +inf.
    // Energies use the exact continuous delta, only the endpoints snap.
    auto move_cost = [&](int t, double from, double to, double* c_out, double* d_out) {
        double delta = to - from;
        double ch = 0.0, dis = 0.0;
        if (delta >= 0.0) {
            ch = delta / bat.charge_efficiency;
            if (ch > bat.max_power + kSlack) return kInf;
        } else {
            dis = -delta * bat.discharge_efficiency;
            if (dis > bat.max_power * bat.discharge_efficiency + kSlack) return kInf;
        }
        if (c_out) *c_out = ch;
        if (d_out) *d_out = dis;
        double g = problem.day.load[t] - problem.day.pv[t] + ch - dis;
        return lambda[t] * g;
    };

    // value[t][i]: cost-to-go from levels[i] at step t, filled backward
    // from the zero terminal value. Idling keeps every state reachable,
    // so the values stay finite.
    std::vector<std::vector<double>> value(T + 1, std::vector<double>(N, 0.0));
    std::vector<std::vector<int>> next(T, std::vector<int>(N, -1));
    for (int t = T - 1; t >= 0; --t) {
        for (int i = 0; i < N; ++i) {
            double best = kInf;
            int best_j = -1;
            for (int j = 0; j < N; ++j) {
                double cost = move_cost(t, levels[i], levels[j], nullptr, nullptr);
                if (cost + value[t + 1][j] < best) {
                    best = cost + value[t + 1][j];
                    best_j = j;
                }
            }
            value[t][i] = best;
            next[t][i] = best_j;
        }
    }

    std::vector<double> charge(T, 0.0), discharge(T, 0.0);
    int level = start;
    for (int t = 0; t < T; ++t) {
        int j = next[t][level];
        move_cost(t, levels[level], levels[j], &charge[t], &discharge[t]);
        level = j;
    }
    return package(problem, std::move(charge), std::move(discharge));
}

EpisodeReport replay(const DispatchSolution& solution, const HouseholdScenario& scenario,
                     const DayData& day, const RewardWeights& weights, double tol) {
    const int T = day.steps();
    if (static_cast<int>(solution.equivalent_actions.size()) != T)
        throw std::invalid_argument("replay: solution/day dimension mismatch");
    Environment env(scenario, day);
    PolicyFn policy = [&solution](const EnvState& s, const Observation&) {
        return solution.equivalent_actions[s.t];
    };
    EpisodeReport rep = env.run_episode(policy, weights);
    for (int t = 0; t < T; ++t) {
        double g_lp = day.load[t] - day.pv[t] + solution.charge[t] - solution.discharge[t];
        if (std::abs(rep.trace[t].grid_exchange - g_lp) > tol) {
            std::ostringstream msg;
            msg << "replay mismatch at t=" << t << ": env grid exchange "
                << rep.trace[t].grid_exchange << " vs dispatch " << g_lp;
            throw std::runtime_error(msg.str());
        }
    }
    return rep;
}

std::string solution_to_csv(const DispatchSolution& solution, const DayData& day,
                            const RewardWeights& weights) {
    std::ostringstream out;
    out << "t,charge,discharge,soc,action,price,carbon,step_cost\n";
    for (int t = 0; t < day.steps(); ++t) {
        double lambda = weights.price_weight * day.price[t] + weights.emission_weight * day.carbon[t];
        double g = day.load[t] - day.pv[t] + solution.charge[t] - solution.discharge[t];
        out << t << ',' << fmt_fixed(solution.charge[t], 6) << ','
            << fmt_fixed(solution.discharge[t], 6) << ',' << fmt_fixed(solution.soc[t + 1], 6)
            << ',' << fmt_fixed(solution.equivalent_actions[t], 6) << ','
            << fmt_fixed(day.price[t], 6) << ',' << fmt_fixed(day.carbon[t], 6) << ','
            << fmt_fixed(lambda * g, 6) << '\n';
    }
    return out.str();
}

}  // namespace fresco
