#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fresco/env.hpp"
#include "fresco/mlp.hpp"
#include "fresco/rng.hpp"

namespace fresco {

// Actor outputs (pre-squash mean, log-std); critic outputs one value.
struct NetLayout {
    int input_dim = kObservationDim;
    std::vector<int> hidden_dims = {64, 64};

    MlpSpec actor_spec() const;
    MlpSpec critic_spec() const;
    void validate() const;
    bool operator==(const NetLayout&) const = default;
};

struct AgentParams {
    NetLayout layout;
    std::vector<double> actor;
    std::vector<double> critic;

    void validate() const;
};

struct TrajectoryStep {
    Observation obs{};
    double action = 0.0;      // squashed, in (-1,1)
    double pre_squash = 0.0;  // Gaussian sample before tanh
    double log_prob = 0.0;
    double reward = 0.0;
    double value = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
};

struct TrainConfig {
    double discount = 0.99;
    double actor_lr = 3e-4;
    double critic_lr = 1e-3;
    double entropy_coef = 1e-3;
    int episodes_per_update = 4;
    double grad_clip = 5.0;

    void validate() const;
};

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kTanhEps = 1e-6;

AgentParams init_params(const NetLayout& layout, std::uint64_t seed);

struct ActResult {
    double action = 0.0;
    double pre_squash = 0.0;
    double log_prob = 0.0;
    double value = 0.0;
};

// Squashed-Gaussian sample: z ~ N(mu, sigma), action = tanh(z). The
// log-probability carries the tanh change-of-variables correction.
ActResult act(const AgentParams& params, const Observation& obs, Rng& rng);

// Deterministic evaluation-mode action tanh(mu).
ActResult act_mean(const AgentParams& params, const Observation& obs);

// Discounted suffix sums: R_t = sum_{k>=t} discount^(k-t) r_k.
std::vector<double> reward_to_go(const std::vector<double>& rewards, double discount);

// Flattened steps from one or more trajectories, with the fixed inputs
// both losses need. Advantages are treated as constants by the actor
// loss (the critic value is detached).
struct StepBatch {
    std::vector<Observation> obs;
    std::vector<double> pre_squash;
    std::vector<double> advantage;
    std::vector<double> returns;

    size_t size() const { return obs.size(); }
};

// Losses as pure functions of the flat parameter vectors, so analytic
// gradients can be checked against finite differences of the same code.
double actor_loss(const NetLayout& layout, std::span<const double> actor_params,
                  const StepBatch& batch, double entropy_coef);
double actor_loss_grad(const NetLayout& layout, std::span<const double> actor_params,
                       const StepBatch& batch, double entropy_coef, std::span<double> grad,
                       double* mean_entropy = nullptr);
double critic_loss(const NetLayout& layout, std::span<const double> critic_params,
                   const StepBatch& batch);
double critic_loss_grad(const NetLayout& layout, std::span<const double> critic_params,
                        const StepBatch& batch, std::span<double> grad);

StepBatch build_step_batch(const AgentParams& params, const std::vector<Trajectory>& trajectories,
                           double discount);

struct UpdateDiagnostics {
    bool ok = true;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double actor_grad_norm = 0.0;  // before clipping
    double critic_grad_norm = 0.0;
    double mean_entropy = 0.0;
};

struct UpdateResult {
    AgentParams params;
    UpdateDiagnostics diagnostics;
};

// One advantage actor-critic update over the batch: reward-to-go
// returns, advantage = return - value, entropy bonus, per-network
// global-norm gradient clipping, plain SGD. A non-finite loss or
// gradient leaves the parameters unchanged and reports ok = false.
UpdateResult a2c_update(const AgentParams& params, const std::vector<Trajectory>& trajectories,
                        const TrainConfig& cfg);

// Collects one episode under the sampling policy; also returns the
// episode report for logging.
struct CollectResult {
    Trajectory trajectory;
    EpisodeReport report;
};
CollectResult collect_episode(const AgentParams& params, const Environment& env,
                              const RewardWeights& weights, Rng& rng);

struct EvalCase {
    HouseholdScenario scenario;
    DayData day;
};

// Mean-action episodes; no parameter change, deterministic.
std::vector<EpisodeReport> evaluate(const AgentParams& params, const std::vector<EvalCase>& cases,
                                    const RewardWeights& weights);

// Text serialization: header with the layout dims, then one value per
// line at 17 significant digits. Round-trips bit-exactly.
std::string params_to_text(const AgentParams& params);
AgentParams params_from_text(const std::string& text);

}  // namespace fresco
