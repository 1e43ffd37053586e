#include "fresco/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fresco/csv.hpp"

namespace fresco {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void BatteryConfig::validate() const {
    if (capacity <= 0.0) throw std::invalid_argument("battery capacity must be > 0");
    if (max_power <= 0.0) throw std::invalid_argument("battery max_power must be > 0");
    if (charge_efficiency <= 0.0 || charge_efficiency > 1.0)
        throw std::invalid_argument("charge_efficiency must lie in (0,1]");
    if (discharge_efficiency <= 0.0 || discharge_efficiency > 1.0)
        throw std::invalid_argument("discharge_efficiency must lie in (0,1]");
    if (initial_soc < 0.0 || initial_soc > 1.0)
        throw std::invalid_argument("initial_soc must lie in [0,1]");
}

Environment::Environment(HouseholdScenario scenario, DayData day)
    : scenario_(std::move(scenario)), day_(std::move(day)) {
    scenario_.battery.validate();
    if (day_.steps() < 1) throw std::invalid_argument("day must have at least one step");
}

EnvState Environment::reset() const {
    EnvState s;
    s.t = 0;
    s.soc = scenario_.battery.initial_soc * scenario_.battery.capacity;
    return s;
}

Observation Environment::observe(const EnvState& state) const {
    if (state.t >= day_.steps()) throw std::invalid_argument("observe: episode is finished");
    double angle = 2.0 * kPi * (state.t % kStepsPerDay) / kStepsPerDay;
    return {std::sin(angle),
            std::cos(angle),
            state.soc / scenario_.battery.capacity,
            day_.pv[state.t],
            day_.load[state.t],
            day_.price[state.t],
            day_.carbon[state.t]};
}

StepOutcome Environment::step(const EnvState& state, double action,
                              const RewardWeights& weights) const {
    weights.validate();
    if (!(action >= -1.0 && action <= 1.0))
        throw std::invalid_argument("action must lie in [-1,1]");
    if (state.t >= day_.steps()) throw std::invalid_argument("step: episode is finished");

    const BatteryConfig& bat = scenario_.battery;
    double p = action * bat.max_power;
    double b;    // grid-side battery draw (positive = drawing from the grid)
    double soc;
    if (p >= 0.0) {
        double stored = std::min(p * bat.charge_efficiency, bat.capacity - state.soc);
        b = stored / bat.charge_efficiency;
        soc = state.soc + stored;
    } else {
        double delivered = std::min(-p * bat.discharge_efficiency,
                                    state.soc * bat.discharge_efficiency);
        b = -delivered;
        soc = state.soc - delivered / bat.discharge_efficiency;
    }
    // A saturating move can land an ulp outside the bounds; the clamp
    // keeps the soc invariant exact without changing the energy flows.
    soc = std::clamp(soc, 0.0, bat.capacity);

    int t = state.t;
    double g = day_.load[t] - day_.pv[t] + b;
    StepOutcome out;
    out.next_state = EnvState{t + 1, soc};
    out.grid_exchange = g;
    out.cost = day_.price[t] * g;
    out.emissions = day_.carbon[t] * g;
    out.reward = -(weights.price_weight * out.cost + weights.emission_weight * out.emissions);
    out.realized_action = std::clamp(b / bat.max_power, -1.0, 1.0);
    return out;
}

EpisodeReport Environment::run_episode(const PolicyFn& policy, const RewardWeights& weights) const {
    EnvState state = reset();
    std::vector<StepRecord> trace;
    trace.reserve(day_.steps());
    for (int t = 0; t < day_.steps(); ++t) {
        Observation obs = observe(state);
        double action = policy(state, obs);
        StepOutcome out = step(state, action, weights);
        StepRecord rec;
        rec.t = t;
        rec.action = action;
        rec.realized_action = out.realized_action;
        rec.soc = out.next_state.soc;
        rec.grid_exchange = out.grid_exchange;
        rec.price = day_.price[t];
        rec.carbon = day_.carbon[t];
        rec.cost = out.cost;
        rec.emissions = out.emissions;
        rec.reward = out.reward;
        trace.push_back(rec);
        state = out.next_state;
    }
    return summarize_trace(scenario_, day_hash(day_), std::move(trace));
}

EpisodeReport summarize_trace(const HouseholdScenario& scenario, std::uint64_t hash,
                              std::vector<StepRecord> trace) {
    EpisodeReport rep;
    rep.household_id = scenario.household_id;
    rep.microgrid_id = scenario.microgrid_id;
    rep.day_hash = hash;
    rep.trace = std::move(trace);
    double price_sum = 0.0, carbon_sum = 0.0;
    for (const StepRecord& r : rep.trace) {
        rep.total_reward += r.reward;
        rep.total_cost += r.cost;
        rep.total_emissions += r.emissions;
        price_sum += r.price * r.grid_exchange;
        carbon_sum += r.carbon * r.grid_exchange;
    }
    int n = rep.steps();
    if (n > 0) {
        rep.price_score = price_sum / n;
        rep.emission_score = carbon_sum / n;
    }
    return rep;
}

std::string trace_to_csv(const std::vector<StepRecord>& trace) {
    std::ostringstream out;
    out << "t,action,realized_action,soc,grid_exchange,price,carbon,cost,emissions,reward\n";
    for (const StepRecord& r : trace) {
        out << r.t << ',' << fmt_fixed(r.action, 6) << ',' << fmt_fixed(r.realized_action, 6)
            << ',' << fmt_fixed(r.soc, 6) << ',' << fmt_fixed(r.grid_exchange, 6) << ','
            << fmt_fixed(r.price, 6) << ',' << fmt_fixed(r.carbon, 6) << ','
            << fmt_fixed(r.cost, 6) << ',' << fmt_fixed(r.emissions, 6) << ','
            << fmt_fixed(r.reward, 6) << '\n';
    }
    return out.str();
}

std::vector<StepRecord> trace_from_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "t,action,realized_action,soc,grid_exchange,price,carbon,cost,emissions,reward")
        throw std::runtime_error("unexpected trace CSV header");
    std::vector<StepRecord> trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 10) throw std::runtime_error("malformed trace CSV row");
        StepRecord r;
        r.t = std::stoi(f[0]);
        r.action = std::stod(f[1]);
        r.realized_action = std::stod(f[2]);
        r.soc = std::stod(f[3]);
        r.grid_exchange = std::stod(f[4]);
        r.price = std::stod(f[5]);
        r.carbon = std::stod(f[6]);
        r.cost = std::stod(f[7]);
        r.emissions = std::stod(f[8]);
        r.reward = std::stod(f[9]);
        trace.push_back(r);
    }
    return trace;
}

}  // namespace fresco
