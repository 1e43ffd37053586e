#include <doctest.h>

#include <cmath>

#include "fresco/env.hpp"

using namespace fresco;

namespace {

DayData flat_day(int steps, double pv, double load, double price, double carbon) {
    DayData d;
    d.pv.assign(steps, pv);
    d.load.assign(steps, load);
    d.price.assign(steps, price);
    d.carbon.assign(steps, carbon);
    return d;
}

HouseholdScenario scenario_with(BatteryConfig bat) {
    HouseholdScenario s;
    s.household_id = 0;
    s.microgrid_id = 0;
    s.battery = bat;
    return s;
}

}  // namespace

TEST_CASE("reset scales initial soc by capacity") {
    BatteryConfig bat;
    Environment env(scenario_with(bat), flat_day(24, 0.3, 0.3, 0.5, 0.1));
    CHECK(env.reset().soc == doctest::Approx(0.5).epsilon(1e-15));

    bat.initial_soc = 0.0;
    Environment empty(scenario_with(bat), flat_day(24, 0, 0, 0.5, 0.1));
    CHECK(empty.reset().soc == 0.0);

    bat.capacity = 2.0;
    bat.initial_soc = 0.25;
    Environment big(scenario_with(bat), flat_day(24, 0, 0, 0.5, 0.1));
    CHECK(big.reset().soc == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("observation carries time encoding and normalized soc") {
    BatteryConfig bat;
    Environment env(scenario_with(bat), flat_day(24, 0.4, 0.6, 0.5, 0.1));
    EnvState s = env.reset();
    Observation obs = env.observe(s);
    CHECK(obs[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(obs[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(obs[3] == 0.4);
    CHECK(obs[4] == 0.6);
    CHECK(obs[5] == 0.5);
    CHECK(obs[6] == 0.1);

    s.t = 6;
    Observation quarter = env.observe(s);
    CHECK(std::abs(quarter[0] - 1.0) < 1e-12);
    CHECK(std::abs(quarter[1]) < 1e-12);

    s.t = 0;
    s.soc = 0.3;
    CHECK(env.observe(s)[2] == doctest::Approx(0.3).epsilon(1e-15));

    s.t = 24;
    CHECK_THROWS_AS(env.observe(s), std::invalid_argument);
}

TEST_CASE("zero action on a balanced day does nothing") {
    BatteryConfig bat;
    Environment env(scenario_with(bat), flat_day(24, 0.3, 0.3, 0.5, 0.1));
    EnvState s = env.reset();
    StepOutcome out = env.step(s, 0.0, RewardWeights{});
    CHECK(out.grid_exchange == 0.0);
    CHECK(out.cost == 0.0);
    CHECK(out.reward == 0.0);
    CHECK(out.next_state.soc == s.soc);
    CHECK(out.realized_action == 0.0);
}

TEST_CASE("charging accounts for efficiency on the grid side") {
    BatteryConfig bat;
    bat.max_power = 0.2;
    bat.charge_efficiency = 0.9;
    Environment env(scenario_with(bat), flat_day(24, 0.0, 0.0, 0.5, 0.1));
    EnvState s = env.reset();  // soc 0.5
    StepOutcome out = env.step(s, 1.0, RewardWeights{});
    CHECK(out.next_state.soc == doctest::Approx(0.68).epsilon(1e-12));
    CHECK(out.grid_exchange == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(out.realized_action == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("discharging an empty battery is a no-op") {
    BatteryConfig bat;
    bat.initial_soc = 0.0;
    Environment env(scenario_with(bat), flat_day(24, 0.0, 0.0, 0.5, 0.1));
    EnvState s = env.reset();
    StepOutcome out = env.step(s, -1.0, RewardWeights{});
    CHECK(out.next_state.soc == 0.0);
    CHECK(out.grid_exchange == 0.0);
    CHECK(out.realized_action == 0.0);
}

TEST_CASE("headroom clips charging near full") {
    BatteryConfig bat;
    bat.initial_soc = 1.0;
    Environment env(scenario_with(bat), flat_day(24, 0.0, 0.0, 0.5, 0.1));
    StepOutcome out = env.step(env.reset(), 1.0, RewardWeights{});
    CHECK(out.next_state.soc == doctest::Approx(bat.capacity).epsilon(1e-15));
    CHECK(out.grid_exchange == 0.0);
    CHECK(out.realized_action == 0.0);
}

TEST_CASE("step rejects invalid actions and finished episodes") {
    BatteryConfig bat;
    Environment env(scenario_with(bat), flat_day(2, 0.0, 0.0, 0.5, 0.1));
    CHECK_THROWS_AS(env.step(env.reset(), 1.5, RewardWeights{}), std::invalid_argument);
    CHECK_THROWS_AS(env.step(env.reset(), std::nan(""), RewardWeights{}), std::invalid_argument);
    EnvState s = env.reset();
    s.t = 2;
    CHECK_THROWS_AS(env.step(s, 0.0, RewardWeights{}), std::invalid_argument);
}

TEST_CASE("lossless battery returns exactly what was stored") {
    BatteryConfig bat;
    bat.charge_efficiency = 1.0;
    bat.discharge_efficiency = 1.0;
    bat.max_power = 1.0;
    bat.initial_soc = 0.0;
    Environment env(scenario_with(bat), flat_day(24, 0.0, 0.0, 0.5, 0.1));
    EnvState s = env.reset();
    StepOutcome charge = env.step(s, 0.4, RewardWeights{});
    CHECK(charge.next_state.soc == doctest::Approx(0.4).epsilon(1e-15));
    StepOutcome discharge = env.step(charge.next_state, -1.0, RewardWeights{});
    CHECK(discharge.grid_exchange == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(discharge.next_state.soc == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("reward decreases when price rises during import") {
    BatteryConfig bat;
    Environment cheap(scenario_with(bat), flat_day(24, 0.0, 0.5, 0.2, 0.1));
    Environment dear(scenario_with(bat), flat_day(24, 0.0, 0.5, 0.9, 0.1));
    double r_cheap = cheap.step(cheap.reset(), 0.0, RewardWeights{}).reward;
    double r_dear = dear.step(dear.reset(), 0.0, RewardWeights{}).reward;
    CHECK(r_dear < r_cheap);
}

TEST_CASE("zero-policy episode equals the no-battery closed form") {
    BatteryConfig bat;
    PvConfig pv;
    pv.noise_std = 0.0;
    LoadConfig load;
    load.noise_std = 0.0;
    GridConfig grid;
    DayData day = generate_day(pv, load, grid, 24, 5);
    HouseholdScenario s = scenario_with(bat);
    s.pv = pv;
    s.load = load;
    Environment env(s, day);
    EpisodeReport rep =
        env.run_episode([](const EnvState&, const Observation&) { return 0.0; }, RewardWeights{});
    double expected_cost = 0.0;
    for (int t = 0; t < 24; ++t) expected_cost += day.price[t] * (day.load[t] - day.pv[t]);
    CHECK(rep.total_cost == doctest::Approx(expected_cost).epsilon(1e-12));
    CHECK(rep.steps() == 24);

    Environment balanced(s, flat_day(24, 0.3, 0.3, 0.7, 0.2));
    EpisodeReport zero = balanced.run_episode(
        [](const EnvState&, const Observation&) { return 0.0; }, RewardWeights{});
    CHECK(zero.total_reward == 0.0);
}

TEST_CASE("one-step day hand arithmetic") {
    BatteryConfig bat;
    Environment env(scenario_with(bat), flat_day(1, 0.0, 1.0, 1.0, 0.2));
    EpisodeReport rep =
        env.run_episode([](const EnvState&, const Observation&) { return 0.0; }, RewardWeights{});
    CHECK(rep.total_cost == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rep.total_emissions == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(rep.total_reward == doctest::Approx(-1.2).epsilon(1e-15));
    CHECK(rep.price_score == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rep.emission_score == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("soc stays within bounds under random actions") {
    Rng rng(77);
    for (int episode = 0; episode < 200; ++episode) {
        BatteryConfig bat;
        bat.capacity = 0.5 + rng.uniform();
        bat.max_power = 0.05 + rng.uniform();
        bat.charge_efficiency = 0.5 + 0.5 * rng.uniform();
        bat.discharge_efficiency = 0.5 + 0.5 * rng.uniform();
        bat.initial_soc = rng.uniform();
        PvConfig pv;
        LoadConfig load;
        GridConfig grid;
        DayData day = generate_day(pv, load, grid, 24, rng.next_u64());
        HouseholdScenario s = scenario_with(bat);
        Environment env(s, day);
        EnvState state = env.reset();
        for (int t = 0; t < 24; ++t) {
            StepOutcome out = env.step(state, rng.uniform(-1.0, 1.0), RewardWeights{});
            CHECK(out.next_state.soc >= 0.0);
            CHECK(out.next_state.soc <= bat.capacity + 1e-12);
            state = out.next_state;
        }
    }
}

TEST_CASE("grid exchange identity holds per step") {
    Rng rng(31);
    BatteryConfig bat;
    PvConfig pv;
    LoadConfig load;
    GridConfig grid;
    DayData day = generate_day(pv, load, grid, 24, 123);
    Environment env(scenario_with(bat), day);
    EnvState state = env.reset();
    for (int t = 0; t < 24; ++t) {
        double before = state.soc;
        StepOutcome out = env.step(state, rng.uniform(-1.0, 1.0), RewardWeights{});
        double stored = out.next_state.soc - before;
        double b = stored >= 0.0 ? stored / bat.charge_efficiency
                                 : stored * bat.discharge_efficiency;
        CHECK(out.grid_exchange ==
              doctest::Approx(day.load[t] - day.pv[t] + b).epsilon(1e-12));
        state = out.next_state;
    }
}

TEST_CASE("trace CSV round-trips") {
    BatteryConfig bat;
    PvConfig pv;
    LoadConfig load;
    GridConfig grid;
    Environment env(scenario_with(bat), generate_day(pv, load, grid, 24, 9));
    EpisodeReport rep = env.run_episode(
        [](const EnvState& s, const Observation&) { return s.t % 2 == 0 ? 0.5 : -0.5; },
        RewardWeights{});
    std::string csv = trace_to_csv(rep.trace);
    auto back = trace_from_csv(csv);
    REQUIRE(back.size() == rep.trace.size());
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].t == rep.trace[i].t);
        CHECK(std::abs(back[i].soc - rep.trace[i].soc) < 5e-7);
        CHECK(std::abs(back[i].reward - rep.trace[i].reward) < 5e-7);
    }
    CHECK(trace_to_csv(back) == csv);
}
