#include "fresco/federation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <sstream>
#include <stdexcept>

#include "fresco/csv.hpp"

namespace fresco {

void FederationConfig::validate() const {
    if (sync_interval < 1) throw std::invalid_argument("sync_interval must be >= 1");
    if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
    for (double w : client_weights)
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("client weights must be finite and >= 0");
}

AgentParams fed_avg(const std::vector<AgentParams>& params_list,
                    const std::vector<double>& weights) {
    if (params_list.empty()) throw std::invalid_argument("fed_avg: no clients");
    if (weights.size() != params_list.size())
        throw std::invalid_argument("fed_avg: weight count does not match client count");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("fed_avg: weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("fed_avg: weights sum to zero");

    const AgentParams& first = params_list.front();
    bool all_identical = true;
    for (const AgentParams& p : params_list) {
        if (p.layout != first.layout || p.actor.size() != first.actor.size() ||
            p.critic.size() != first.critic.size())
            throw std::invalid_argument("fed_avg: client layouts differ");
        if (all_identical && (p.actor != first.actor || p.critic != first.critic))
            all_identical = false;
    }
    // Identical inputs average to themselves; returning the input keeps
    // that exact (and makes single-client federation bit-stable).
    if (all_identical) return first;

    // Weighted mean, clamped into the elementwise input envelope so the
    // containment invariant survives rounding.
    auto combine = [&](auto member) {
        std::vector<double> out(std::invoke(member, first).size());
        for (size_t i = 0; i < out.size(); ++i) {
            double acc = 0.0, lo = std::invoke(member, first)[i], hi = lo;
            for (size_t k = 0; k < params_list.size(); ++k) {
                double v = std::invoke(member, params_list[k])[i];
                acc += weights[k] * v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            out[i] = std::clamp(acc / total, lo, hi);
        }
        return out;
    };
    AgentParams avg;
    avg.layout = first.layout;
    avg.actor = combine(&AgentParams::actor);
    avg.critic = combine(&AgentParams::critic);
    return avg;
}

std::string round_log_to_csv(const std::vector<RoundLogRow>& rows) {
    std::ostringstream out;
    out << "round,client_id,split,mean_reward,price_score,emission_score\n";
    for (const RoundLogRow& r : rows) {
        out << r.round << ',' << r.client_id << ',' << r.split << ','
            << fmt_exact(r.mean_reward) << ',' << fmt_exact(r.price_score) << ','
            << fmt_exact(r.emission_score) << '\n';
    }
    return out.str();
}

namespace {

struct ClientRoundResult {
    AgentParams params;
    double mean_reward = 0.0;
    double price_score = 0.0;
    double emission_score = 0.0;
    int episodes = 0;
    bool ok = true;
    std::string error;
};

// One client's local training slice for one round. All randomness comes
// from streams derived from (master_seed, client_id, round), so the
// result does not depend on when or where this runs.
ClientRoundResult run_client_round(AgentParams params, const HouseholdScenario& scenario,
                                   const TrainingSetup& setup, const TrainConfig& cfg,
                                   int sync_interval, std::uint64_t master_seed, int round) {
    ClientRoundResult res;
    const std::uint64_t cid = static_cast<std::uint64_t>(scenario.household_id);
    Rng action_rng(derive_seed(master_seed, {kSeedTrainActions, cid, static_cast<std::uint64_t>(round)}));

    std::vector<Trajectory> batch;
    double reward_sum = 0.0, price_sum = 0.0, emission_sum = 0.0;
    try {
        for (int e = 0; e < sync_interval; ++e) {
            std::uint64_t day_seed = derive_seed(
                master_seed, {kSeedTrainDay, cid, static_cast<std::uint64_t>(round),
                              static_cast<std::uint64_t>(e)});
            DayData day = generate_day(scenario.pv, scenario.load, setup.grid,
                                       setup.episode_steps, day_seed);
            Environment env(scenario, day);
            CollectResult collected = collect_episode(params, env, setup.weights, action_rng);
            reward_sum += collected.report.total_reward / collected.report.steps();
            price_sum += collected.report.price_score;
            emission_sum += collected.report.emission_score;
            batch.push_back(std::move(collected.trajectory));
            ++res.episodes;

            if (static_cast<int>(batch.size()) == cfg.episodes_per_update ||
                e == sync_interval - 1) {
                UpdateResult upd = a2c_update(params, batch, cfg);
                if (!upd.diagnostics.ok) {
                    res.ok = false;
                    res.error = "non-finite loss in a2c_update";
                    return res;
                }
                params = std::move(upd.params);
                batch.clear();
            }
        }
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
        return res;
    }
    res.params = std::move(params);
    res.mean_reward = reward_sum / sync_interval;
    res.price_score = price_sum / sync_interval;
    res.emission_score = emission_sum / sync_interval;
    return res;
}

std::vector<EvalCase> validation_cases(const TrainingSetup& setup, std::uint64_t master_seed,
                                       int round) {
    std::vector<EvalCase> cases;
    for (const HouseholdScenario& s : setup.validation_scenarios) {
        std::uint64_t seed = derive_seed(master_seed,
                                         {kSeedValDay, static_cast<std::uint64_t>(round),
                                          static_cast<std::uint64_t>(s.household_id)});
        cases.push_back({s, generate_day(s.pv, s.load, setup.grid, setup.episode_steps, seed)});
    }
    return cases;
}

TrainingOutcome run_training(const TrainingSetup& setup, const TrainConfig& train_cfg,
                             const FederationConfig& fed_cfg, std::uint64_t master_seed,
                             bool synchronize, const RoundCallback& on_round) {
    train_cfg.validate();
    fed_cfg.validate();
    setup.weights.validate();
    if (setup.train_scenarios.empty())
        throw std::invalid_argument("training requires at least one client");
    const size_t n_clients = setup.train_scenarios.size();
    std::vector<double> weights = fed_cfg.client_weights;
    if (weights.empty()) weights.assign(n_clients, 1.0);
    if (weights.size() != n_clients)
        throw std::invalid_argument("client_weights count does not match client count");

    TrainingOutcome outcome;
    AgentParams init = init_params(setup.layout, derive_seed(master_seed, {kSeedInit}));
    outcome.clients.resize(n_clients);
    for (size_t k = 0; k < n_clients; ++k) {
        outcome.clients[k].client_id = setup.train_scenarios[k].household_id;
        outcome.clients[k].scenario = setup.train_scenarios[k];
        outcome.clients[k].params = init;
    }
    AgentParams last_average = init;

    for (int round = 0; round < fed_cfg.rounds; ++round) {
        // Barrier round: clients run independently, then all results
        // are collected before any state is committed.
        std::vector<std::future<ClientRoundResult>> futures;
        futures.reserve(n_clients);
        for (size_t k = 0; k < n_clients; ++k) {
            futures.push_back(std::async(std::launch::async, run_client_round,
                                         outcome.clients[k].params,
                                         std::cref(setup.train_scenarios[k]), std::cref(setup),
                                         std::cref(train_cfg), fed_cfg.sync_interval, master_seed,
                                         round));
        }
        std::vector<ClientRoundResult> results(n_clients);
        for (size_t k = 0; k < n_clients; ++k) results[k] = futures[k].get();

        for (size_t k = 0; k < n_clients; ++k) {
            if (!results[k].ok) {
                // Roll every client back to the last synchronized state.
                for (ClientState& c : outcome.clients) c.params = last_average;
                outcome.final_params = last_average;
                outcome.aborted_round = round;
                outcome.error = "client " + std::to_string(outcome.clients[k].client_id) +
                                ": " + results[k].error;
                return outcome;
            }
        }

        for (size_t k = 0; k < n_clients; ++k) {
            outcome.clients[k].params = std::move(results[k].params);
            outcome.clients[k].episodes_completed += results[k].episodes;
            outcome.round_log.push_back({round, outcome.clients[k].client_id, "train",
                                         results[k].mean_reward, results[k].price_score,
                                         results[k].emission_score});
        }

        if (synchronize) {
            std::vector<AgentParams> all;
            all.reserve(n_clients);
            for (const ClientState& c : outcome.clients) all.push_back(c.params);
            last_average = fed_avg(all, weights);
            for (ClientState& c : outcome.clients) c.params = last_average;
        }

        std::vector<EvalCase> val = validation_cases(setup, master_seed, round);
        for (const ClientState& c : outcome.clients) {
            double mr = 0.0, ps = 0.0, es = 0.0;
            if (!val.empty()) {
                std::vector<EpisodeReport> reps = evaluate(c.params, val, setup.weights);
                for (const EpisodeReport& r : reps) {
                    mr += r.total_reward / r.steps();
                    ps += r.price_score;
                    es += r.emission_score;
                }
                mr /= reps.size();
                ps /= reps.size();
                es /= reps.size();
            }
            outcome.round_log.push_back({round, c.client_id, "validation", mr, ps, es});
        }

        if (on_round) on_round(round, outcome.clients, synchronize ? &last_average : nullptr);
    }

    outcome.final_params = synchronize ? last_average : outcome.clients.front().params;
    return outcome;
}

}  // namespace

TrainingOutcome run_federated_training(const TrainingSetup& setup, const TrainConfig& train_cfg,
                                       const FederationConfig& fed_cfg, std::uint64_t master_seed,
                                       const RoundCallback& on_round) {
    return run_training(setup, train_cfg, fed_cfg, master_seed, true, on_round);
}

TrainingOutcome run_isolated_training(const TrainingSetup& setup, const TrainConfig& train_cfg,
                                      const FederationConfig& fed_cfg, std::uint64_t master_seed,
                                      const RoundCallback& on_round) {
    return run_training(setup, train_cfg, fed_cfg, master_seed, false, on_round);
}

}  // namespace fresco
