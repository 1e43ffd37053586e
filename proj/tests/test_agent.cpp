#include <doctest.h>

#include <cmath>

#include "fresco/agent.hpp"
#include "test_util.hpp"

using namespace fresco;

namespace {

NetLayout small_layout() {
    NetLayout layout;
    layout.input_dim = 7;
    layout.hidden_dims = {4};
    return layout;
}

AgentParams zero_params(const NetLayout& layout) {
    AgentParams p;
    p.layout = layout;
    p.actor.assign(layout.actor_spec().param_count(), 0.0);
    p.critic.assign(layout.critic_spec().param_count(), 0.0);
    return p;
}

Trajectory still_trajectory(int steps) {
    Trajectory traj;
    for (int t = 0; t < steps; ++t) {
        TrajectoryStep s;
        s.obs = {0.1, 0.2, 0.5, 0.3, 0.4, 0.6, 0.2};
        s.pre_squash = 0.0;
        s.action = 0.0;
        s.reward = 0.0;
        s.value = 0.0;
        traj.steps.push_back(s);
    }
    return traj;
}

}  // namespace

TEST_CASE("init_params is deterministic with zero biases") {
    NetLayout layout = small_layout();
    AgentParams a = init_params(layout, 5);
    AgentParams b = init_params(layout, 5);
    CHECK(a.actor == b.actor);
    CHECK(a.critic == b.critic);
    AgentParams c = init_params(layout, 6);
    CHECK(a.actor != c.actor);

    // Layer blocks are [weights, biases]; biases must be exactly zero.
    // dims {7,4,2}: biases at [28,32) and [40,42).
    for (int i = 28; i < 32; ++i) CHECK(a.actor[i] == 0.0);
    for (int i = 40; i < 42; ++i) CHECK(a.actor[i] == 0.0);

    double limit0 = std::sqrt(6.0 / (7 + 4));
    for (int i = 0; i < 28; ++i) {
        CHECK(a.actor[i] >= -limit0);
        CHECK(a.actor[i] <= limit0);
    }
}

TEST_CASE("mean action of a zero network is zero") {
    AgentParams p = zero_params(small_layout());
    Observation obs = {0.3, -0.2, 0.5, 0.1, 0.9, 0.4, 0.2};
    ActResult r = act_mean(p, obs);
    CHECK(r.action == 0.0);
    CHECK(r.value == 0.0);
}

TEST_CASE("sampled actions stay strictly inside (-1,1) with finite log_prob") {
    AgentParams p = init_params(small_layout(), 9);
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        Observation obs{};
        for (double& v : obs) v = rng.uniform(-1.0, 1.0);
        ActResult r = act(p, obs, rng);
        CHECK(r.action > -1.0);
        CHECK(r.action < 1.0);
        CHECK(std::isfinite(r.log_prob));
        CHECK(r.action == doctest::Approx(std::tanh(r.pre_squash)).epsilon(1e-15));
    }
}

TEST_CASE("reward_to_go matches the suffix-sum contract") {
    CHECK(reward_to_go({1, 1, 1}, 1.0) == std::vector<double>{3, 2, 1});
    CHECK(reward_to_go({3, -2, 5}, 0.0) == std::vector<double>{3, -2, 5});
    CHECK(reward_to_go({1, 2}, 0.5) == std::vector<double>{2, 2});
    CHECK_THROWS_AS(reward_to_go({}, 0.9), std::invalid_argument);
}

TEST_CASE("reward_to_go is linear in the rewards") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + static_cast<int>(rng.next_u64() % 10);
        std::vector<double> r(n), s(n), mix(n);
        double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
        for (int i = 0; i < n; ++i) {
            r[i] = rng.uniform(-1.0, 1.0);
            s[i] = rng.uniform(-1.0, 1.0);
            mix[i] = a * r[i] + b * s[i];
        }
        double gamma = rng.uniform();
        auto lhs = reward_to_go(mix, gamma);
        auto rr = reward_to_go(r, gamma);
        auto ss = reward_to_go(s, gamma);
        for (int i = 0; i < n; ++i)
            CHECK(lhs[i] == doctest::Approx(a * rr[i] + b * ss[i]).epsilon(1e-12));
    }
}

TEST_CASE("actor gradient matches finite differences") {
    Rng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        AgentParams p = init_params(small_layout(), 1000 + trial);
        StepBatch batch = testutil::random_batch(5, 7, rng);
        CHECK(testutil::actor_fd_error(p, batch, 1e-3, 1e-5) < 1e-4);
    }
}

TEST_CASE("critic gradient matches finite differences") {
    Rng rng(202);
    for (int trial = 0; trial < 10; ++trial) {
        AgentParams p = init_params(small_layout(), 2000 + trial);
        StepBatch batch = testutil::random_batch(5, 7, rng);
        CHECK(testutil::critic_fd_error(p, batch, 1e-5) < 1e-4);
    }
}

TEST_CASE("zero advantages with zero entropy leave the actor unchanged") {
    AgentParams p = zero_params(small_layout());
    TrainConfig cfg;
    cfg.entropy_coef = 0.0;
    UpdateResult res = a2c_update(p, {still_trajectory(6)}, cfg);
    CHECK(res.diagnostics.ok);
    CHECK(res.params.actor == p.actor);
    CHECK(res.params.critic == p.critic);  // V == R == 0 everywhere
    CHECK(res.diagnostics.critic_loss == 0.0);
}

TEST_CASE("entropy bonus raises log-std when advantages vanish") {
    NetLayout layout = small_layout();
    AgentParams p = zero_params(layout);
    TrainConfig cfg;
    cfg.entropy_coef = 0.01;
    UpdateResult res = a2c_update(p, {still_trajectory(6)}, cfg);
    REQUIRE(res.diagnostics.ok);

    Observation obs = {0.1, 0.2, 0.5, 0.3, 0.4, 0.6, 0.2};
    MlpWorkspace ws;
    mlp_forward(layout.actor_spec(), res.params.actor,
                std::span<const double>(obs.data(), obs.size()), ws);
    CHECK(ws.acts.back()[1] > 0.0);                       // log-std moved up
    CHECK(ws.acts.back()[0] == doctest::Approx(0.0));     // mean untouched
}

TEST_CASE("a2c_update is deterministic and leaves inputs intact") {
    Rng rng(7);
    AgentParams p = init_params(small_layout(), 3);
    Trajectory traj;
    for (int t = 0; t < 8; ++t) {
        TrajectoryStep s;
        for (double& v : s.obs) v = rng.uniform(-1.0, 1.0);
        s.pre_squash = rng.uniform(-1.0, 1.0);
        s.reward = rng.uniform(-1.0, 1.0);
        traj.steps.push_back(s);
    }
    TrainConfig cfg;
    UpdateResult a = a2c_update(p, {traj}, cfg);
    UpdateResult b = a2c_update(p, {traj}, cfg);
    CHECK(a.params.actor == b.params.actor);
    CHECK(a.params.critic == b.params.critic);
    CHECK(a.params.actor != p.actor);
}

TEST_CASE("non-finite parameters abort the update with params unchanged") {
    AgentParams p = zero_params(small_layout());
    p.critic[0] = std::nan("");
    UpdateResult res = a2c_update(p, {still_trajectory(4)}, TrainConfig{});
    CHECK_FALSE(res.diagnostics.ok);
    CHECK(res.params.actor == p.actor);
    CHECK(std::isnan(res.params.critic[0]));
}

TEST_CASE("build_step_batch uses the current critic for advantages") {
    AgentParams p = zero_params(small_layout());
    Trajectory traj = still_trajectory(3);
    traj.steps[0].reward = 1.0;
    traj.steps[1].reward = 2.0;
    traj.steps[2].reward = 4.0;
    StepBatch batch = build_step_batch(p, {traj}, 0.5);
    REQUIRE(batch.size() == 3);
    CHECK(batch.returns[0] == doctest::Approx(1.0 + 0.5 * (2.0 + 0.5 * 4.0)).epsilon(1e-15));
    CHECK(batch.returns[2] == doctest::Approx(4.0).epsilon(1e-15));
    for (size_t i = 0; i < 3; ++i)
        CHECK(batch.advantage[i] == doctest::Approx(batch.returns[i]).epsilon(1e-15));
}

TEST_CASE("collect_episode records a full trajectory consistent with its report") {
    HouseholdScenario s;
    PvConfig pv;
    LoadConfig load;
    GridConfig grid;
    DayData day = generate_day(pv, load, grid, 24, 33);
    Environment env(s, day);
    AgentParams p = init_params(NetLayout{}, 1);
    Rng rng(4);
    CollectResult res = collect_episode(p, env, RewardWeights{}, rng);
    REQUIRE(res.trajectory.steps.size() == 24);
    REQUIRE(res.report.steps() == 24);
    double sum = 0.0;
    for (size_t t = 0; t < res.trajectory.steps.size(); ++t) {
        const TrajectoryStep& st = res.trajectory.steps[t];
        CHECK(st.reward == res.report.trace[t].reward);
        CHECK(st.action == doctest::Approx(std::tanh(st.pre_squash)).epsilon(1e-15));
        sum += st.reward;
    }
    CHECK(res.report.total_reward == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("evaluate is deterministic and preserves order") {
    HouseholdScenario s;
    PvConfig pv;
    LoadConfig load;
    GridConfig grid;
    std::vector<EvalCase> cases;
    for (int i = 0; i < 3; ++i) {
        s.household_id = i;
        cases.push_back({s, generate_day(pv, load, grid, 24, 50 + i)});
    }
    AgentParams p = init_params(NetLayout{}, 12);
    auto a = evaluate(p, cases, RewardWeights{});
    auto b = evaluate(p, cases, RewardWeights{});
    REQUIRE(a.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(a[i].household_id == static_cast<int>(i));
        CHECK(a[i].total_reward == b[i].total_reward);
        CHECK(a[i].day_hash == b[i].day_hash);
    }
    CHECK(evaluate(p, {}, RewardWeights{}).empty());
}

TEST_CASE("zero-mean policy on a balanced day costs nothing") {
    HouseholdScenario s;
    s.pv.noise_std = 0.0;
    s.load.noise_std = 0.0;
    DayData day;
    day.pv.assign(24, 0.4);
    day.load.assign(24, 0.4);
    day.price.assign(24, 0.6);
    day.carbon.assign(24, 0.3);
    AgentParams p = zero_params(NetLayout{});
    auto reports = evaluate(p, {{s, day}}, RewardWeights{});
    CHECK(reports[0].total_cost == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("params serialize text round-trips exactly") {
    AgentParams p = init_params(NetLayout{7, {5, 3}}, 77);
    std::string text = params_to_text(p);
    AgentParams back = params_from_text(text);
    CHECK(back.layout == p.layout);
    CHECK(back.actor == p.actor);
    CHECK(back.critic == p.critic);
    CHECK_THROWS(params_from_text("not a params file"));
}
