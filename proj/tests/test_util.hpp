#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fresco/agent.hpp"
#include "fresco/rng.hpp"

namespace fresco::testutil {

inline StepBatch random_batch(int n, int input_dim, Rng& rng) {
    StepBatch batch;
    for (int i = 0; i < n; ++i) {
        Observation obs{};
        for (int d = 0; d < input_dim && d < static_cast<int>(obs.size()); ++d)
            obs[d] = rng.uniform(-1.0, 1.0);
        batch.obs.push_back(obs);
        batch.pre_squash.push_back(rng.uniform(-2.0, 2.0));
        batch.advantage.push_back(rng.uniform(-1.0, 1.0));
        batch.returns.push_back(rng.uniform(-1.0, 1.0));
    }
    return batch;
}

// Relative disagreement between an analytic gradient and central finite
// differences of `loss_at`, measured in the l2 norm.
template <typename LossFn>
double fd_relative_error(const std::vector<double>& params, const std::vector<double>& analytic,
                         LossFn loss_at, double eps) {
    std::vector<double> fd(params.size());
    std::vector<double> probe = params;
    for (size_t i = 0; i < params.size(); ++i) {
        probe[i] = params[i] + eps;
        double up = loss_at(probe);
        probe[i] = params[i] - eps;
        double down = loss_at(probe);
        probe[i] = params[i];
        fd[i] = (up - down) / (2.0 * eps);
    }
    double diff = 0.0, nfd = 0.0, nan_ = 0.0;
    for (size_t i = 0; i < fd.size(); ++i) {
        diff += (fd[i] - analytic[i]) * (fd[i] - analytic[i]);
        nfd += fd[i] * fd[i];
        nan_ += analytic[i] * analytic[i];
    }
    return std::sqrt(diff) / std::max({std::sqrt(nfd), std::sqrt(nan_), 1e-12});
}

inline double actor_fd_error(const AgentParams& params, const StepBatch& batch,
                             double entropy_coef, double eps) {
    std::vector<double> grad(params.actor.size(), 0.0);
    actor_loss_grad(params.layout, params.actor, batch, entropy_coef, grad, nullptr);
    return fd_relative_error(params.actor, grad,
                             [&](const std::vector<double>& p) {
                                 return actor_loss(params.layout, p, batch, entropy_coef);
                             },
                             eps);
}

inline double critic_fd_error(const AgentParams& params, const StepBatch& batch, double eps) {
    std::vector<double> grad(params.critic.size(), 0.0);
    critic_loss_grad(params.layout, params.critic, batch, grad);
    return fd_relative_error(params.critic, grad,
                             [&](const std::vector<double>& p) {
                                 return critic_loss(params.layout, p, batch);
                             },
                             eps);
}

}  // namespace fresco::testutil
