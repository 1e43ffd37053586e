#include "fresco/agent.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fresco/csv.hpp"

namespace fresco {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Actor head: returns (mu, clamped log-std, clamp mask for backprop).
struct ActorHead {
    double mu;
    double log_std;
    bool clamped;
};

ActorHead actor_head(const MlpSpec& spec, std::span<const double> params, const Observation& obs,
                     MlpWorkspace& ws) {
    mlp_forward(spec, params, std::span<const double>(obs.data(), obs.size()), ws);
    double mu = ws.acts.back()[0];
    double raw = ws.acts.back()[1];
    ActorHead h;
    h.mu = mu;
    h.log_std = std::clamp(raw, kLogStdMin, kLogStdMax);
    h.clamped = raw <= kLogStdMin || raw >= kLogStdMax;
    return h;
}

}  // namespace

MlpSpec NetLayout::actor_spec() const {
    std::vector<int> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(2);
    return MlpSpec{std::move(dims)};
}

MlpSpec NetLayout::critic_spec() const {
    std::vector<int> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(1);
    return MlpSpec{std::move(dims)};
}

void NetLayout::validate() const {
    if (input_dim <= 0) throw std::invalid_argument("input_dim must be positive");
    for (int h : hidden_dims)
        if (h <= 0) throw std::invalid_argument("hidden dims must be positive");
}

void AgentParams::validate() const {
    layout.validate();
    if (static_cast<int>(actor.size()) != layout.actor_spec().param_count())
        throw std::invalid_argument("actor vector length does not match layout");
    if (static_cast<int>(critic.size()) != layout.critic_spec().param_count())
        throw std::invalid_argument("critic vector length does not match layout");
    if (!all_finite(actor) || !all_finite(critic))
        throw std::invalid_argument("parameters must be finite");
}

void TrainConfig::validate() const {
    if (discount < 0.0 || discount > 1.0) throw std::invalid_argument("discount must lie in [0,1]");
    if (actor_lr <= 0.0 || critic_lr <= 0.0) throw std::invalid_argument("learning rates must be > 0");
    if (entropy_coef < 0.0) throw std::invalid_argument("entropy_coef must be >= 0");
    if (episodes_per_update < 1) throw std::invalid_argument("episodes_per_update must be >= 1");
    if (grad_clip <= 0.0) throw std::invalid_argument("grad_clip must be > 0");
}

AgentParams init_params(const NetLayout& layout, std::uint64_t seed) {
    layout.validate();
    AgentParams p;
    p.layout = layout;
    Rng actor_rng(derive_seed(seed, {1}));
    Rng critic_rng(derive_seed(seed, {2}));
    p.actor = mlp_init(layout.actor_spec(), actor_rng);
    p.critic = mlp_init(layout.critic_spec(), critic_rng);
    return p;
}

ActResult act(const AgentParams& params, const Observation& obs, Rng& rng) {
    MlpWorkspace ws;
    ActorHead h = actor_head(params.layout.actor_spec(), params.actor, obs, ws);
    if (!std::isfinite(h.mu) || !std::isfinite(h.log_std))
        throw std::runtime_error("actor produced non-finite output");
    double sigma = std::exp(h.log_std);
    double z = h.mu + sigma * rng.normal();
    double a = std::tanh(z);
    double u = (z - h.mu) / sigma;
    ActResult r;
    r.action = a;
    r.pre_squash = z;
    r.log_prob = -0.5 * u * u - h.log_std - 0.5 * kLog2Pi - std::log(1.0 - a * a + kTanhEps);

    MlpWorkspace cws;
    mlp_forward(params.layout.critic_spec(), params.critic,
                std::span<const double>(obs.data(), obs.size()), cws);
    r.value = cws.acts.back()[0];
    if (!std::isfinite(r.value)) throw std::runtime_error("critic produced non-finite output");
    return r;
}

ActResult act_mean(const AgentParams& params, const Observation& obs) {
    MlpWorkspace ws;
    ActorHead h = actor_head(params.layout.actor_spec(), params.actor, obs, ws);
    if (!std::isfinite(h.mu)) throw std::runtime_error("actor produced non-finite output");
    ActResult r;
    r.pre_squash = h.mu;
    r.action = std::tanh(h.mu);
    r.log_prob = 0.0;
    MlpWorkspace cws;
    mlp_forward(params.layout.critic_spec(), params.critic,
                std::span<const double>(obs.data(), obs.size()), cws);
    r.value = cws.acts.back()[0];
    return r;
}

std::vector<double> reward_to_go(const std::vector<double>& rewards, double discount) {
    if (rewards.empty()) throw std::invalid_argument("reward_to_go: empty rewards");
    std::vector<double> returns(rewards.size());
    double acc = 0.0;
    for (int t = static_cast<int>(rewards.size()) - 1; t >= 0; --t) {
        acc = rewards[t] + discount * acc;
        returns[t] = acc;
    }
    return returns;
}

double actor_loss(const NetLayout& layout, std::span<const double> actor_params,
                  const StepBatch& batch, double entropy_coef) {
    const MlpSpec spec = layout.actor_spec();
    const double n = static_cast<double>(batch.size());
    MlpWorkspace ws;
    double pg = 0.0, ent = 0.0;
    for (size_t i = 0; i < batch.size(); ++i) {
        ActorHead h = actor_head(spec, actor_params, batch.obs[i], ws);
        double sigma = std::exp(h.log_std);
        double z = batch.pre_squash[i];
        double u = (z - h.mu) / sigma;
        double a = std::tanh(z);
        double logp = -0.5 * u * u - h.log_std - 0.5 * kLog2Pi - std::log(1.0 - a * a + kTanhEps);
        pg += logp * batch.advantage[i];
        ent += 0.5 * (1.0 + kLog2Pi) + h.log_std;
    }
    return -pg / n - entropy_coef * ent / n;
}

double actor_loss_grad(const NetLayout& layout, std::span<const double> actor_params,
                       const StepBatch& batch, double entropy_coef, std::span<double> grad,
                       double* mean_entropy) {
    const MlpSpec spec = layout.actor_spec();
    const double n = static_cast<double>(batch.size());
    std::fill(grad.begin(), grad.end(), 0.0);
    MlpWorkspace ws;
    double pg = 0.0, ent = 0.0;
    for (size_t i = 0; i < batch.size(); ++i) {
        ActorHead h = actor_head(spec, actor_params, batch.obs[i], ws);
        double sigma = std::exp(h.log_std);
        double z = batch.pre_squash[i];
        double u = (z - h.mu) / sigma;
        double a = std::tanh(z);
        double logp = -0.5 * u * u - h.log_std - 0.5 * kLog2Pi - std::log(1.0 - a * a + kTanhEps);
        pg += logp * batch.advantage[i];
        ent += 0.5 * (1.0 + kLog2Pi) + h.log_std;

        // d logp / d mu = u / sigma; d logp / d log_std = u^2 - 1.
        // The tanh correction depends only on the stored sample.
        double d_mu = -(batch.advantage[i] / n) * (u / sigma);
        double d_ls = -(batch.advantage[i] / n) * (u * u - 1.0) - entropy_coef / n;
        if (h.clamped) d_ls = 0.0;
        const double d_out[2] = {d_mu, d_ls};
        mlp_backward(spec, actor_params, ws, d_out, grad);
    }
    if (mean_entropy) *mean_entropy = ent / n;
    return -pg / n - entropy_coef * ent / n;
}

double critic_loss(const NetLayout& layout, std::span<const double> critic_params,
                   const StepBatch& batch) {
    const MlpSpec spec = layout.critic_spec();
    const double n = static_cast<double>(batch.size());
    MlpWorkspace ws;
    double loss = 0.0;
    for (size_t i = 0; i < batch.size(); ++i) {
        mlp_forward(spec, critic_params,
                    std::span<const double>(batch.obs[i].data(), batch.obs[i].size()), ws);
        double err = ws.acts.back()[0] - batch.returns[i];
        loss += err * err;
    }
    return loss / n;
}

double critic_loss_grad(const NetLayout& layout, std::span<const double> critic_params,
                        const StepBatch& batch, std::span<double> grad) {
    const MlpSpec spec = layout.critic_spec();
    const double n = static_cast<double>(batch.size());
    std::fill(grad.begin(), grad.end(), 0.0);
    MlpWorkspace ws;
    double loss = 0.0;
    for (size_t i = 0; i < batch.size(); ++i) {
        mlp_forward(spec, critic_params,
                    std::span<const double>(batch.obs[i].data(), batch.obs[i].size()), ws);
        double err = ws.acts.back()[0] - batch.returns[i];
        loss += err * err;
        const double d_out[1] = {2.0 * err / n};
        mlp_backward(spec, critic_params, ws, d_out, grad);
    }
    return loss / n;
}

StepBatch build_step_batch(const AgentParams& params, const std::vector<Trajectory>& trajectories,
                           double discount) {
    StepBatch batch;
    const MlpSpec cspec = params.layout.critic_spec();
    MlpWorkspace ws;
    for (const Trajectory& traj : trajectories) {
        if (traj.steps.empty()) throw std::invalid_argument("empty trajectory");
        std::vector<double> rewards(traj.steps.size());
        for (size_t t = 0; t < traj.steps.size(); ++t) rewards[t] = traj.steps[t].reward;
        std::vector<double> returns = reward_to_go(rewards, discount);
        for (size_t t = 0; t < traj.steps.size(); ++t) {
            const TrajectoryStep& s = traj.steps[t];
            mlp_forward(cspec, params.critic,
                        std::span<const double>(s.obs.data(), s.obs.size()), ws);
            double value = ws.acts.back()[0];
            batch.obs.push_back(s.obs);
            batch.pre_squash.push_back(s.pre_squash);
            batch.returns.push_back(returns[t]);
            batch.advantage.push_back(returns[t] - value);
        }
    }
    return batch;
}

namespace {

void clip_to_norm(std::span<double> grad, double max_norm, double norm) {
    if (norm > max_norm && norm > 0.0) {
        double scale = max_norm / norm;
        for (double& g : grad) g *= scale;
    }
}

}  // namespace

UpdateResult a2c_update(const AgentParams& params, const std::vector<Trajectory>& trajectories,
                        const TrainConfig& cfg) {
    cfg.validate();
    if (trajectories.empty()) throw std::invalid_argument("a2c_update: no trajectories");

    StepBatch batch = build_step_batch(params, trajectories, cfg.discount);

    std::vector<double> agrad(params.actor.size(), 0.0);
    std::vector<double> cgrad(params.critic.size(), 0.0);
    UpdateDiagnostics diag;
    diag.actor_loss = actor_loss_grad(params.layout, params.actor, batch, cfg.entropy_coef,
                                      agrad, &diag.mean_entropy);
    diag.critic_loss = critic_loss_grad(params.layout, params.critic, batch, cgrad);
    diag.actor_grad_norm = l2_norm(agrad);
    diag.critic_grad_norm = l2_norm(cgrad);

    if (!std::isfinite(diag.actor_loss) || !std::isfinite(diag.critic_loss) ||
        !std::isfinite(diag.actor_grad_norm) || !std::isfinite(diag.critic_grad_norm)) {
        diag.ok = false;
        return {params, diag};
    }

    clip_to_norm(agrad, cfg.grad_clip, diag.actor_grad_norm);
    clip_to_norm(cgrad, cfg.grad_clip, diag.critic_grad_norm);

    UpdateResult res{params, diag};
    for (size_t i = 0; i < res.params.actor.size(); ++i)
        res.params.actor[i] -= cfg.actor_lr * agrad[i];
    for (size_t i = 0; i < res.params.critic.size(); ++i)
        res.params.critic[i] -= cfg.critic_lr * cgrad[i];
    return res;
}

CollectResult collect_episode(const AgentParams& params, const Environment& env,
                              const RewardWeights& weights, Rng& rng) {
    EnvState state = env.reset();
    CollectResult out;
    std::vector<StepRecord> trace;
    trace.reserve(env.horizon());
    for (int t = 0; t < env.horizon(); ++t) {
        Observation obs = env.observe(state);
        ActResult a = act(params, obs, rng);
        StepOutcome sr = env.step(state, a.action, weights);
        TrajectoryStep ts;
        ts.obs = obs;
        ts.action = a.action;
        ts.pre_squash = a.pre_squash;
        ts.log_prob = a.log_prob;
        ts.reward = sr.reward;
        ts.value = a.value;
        out.trajectory.steps.push_back(ts);

        StepRecord rec;
        rec.t = t;
        rec.action = a.action;
        rec.realized_action = sr.realized_action;
        rec.soc = sr.next_state.soc;
        rec.grid_exchange = sr.grid_exchange;
        rec.price = env.day().price[t];
        rec.carbon = env.day().carbon[t];
        rec.cost = sr.cost;
        rec.emissions = sr.emissions;
        rec.reward = sr.reward;
        trace.push_back(rec);
        state = sr.next_state;
    }
    out.report = summarize_trace(env.scenario(), day_hash(env.day()), std::move(trace));
    return out;
}

std::vector<EpisodeReport> evaluate(const AgentParams& params, const std::vector<EvalCase>& cases,
                                    const RewardWeights& weights) {
    params.validate();
    std::vector<EpisodeReport> reports;
    reports.reserve(cases.size());
    for (const EvalCase& c : cases) {
        Environment env(c.scenario, c.day);
        PolicyFn policy = [&params](const EnvState&, const Observation& obs) {
            return act_mean(params, obs).action;
        };
        reports.push_back(env.run_episode(policy, weights));
    }
    return reports;
}

std::string params_to_text(const AgentParams& params) {
    params.validate();
    std::ostringstream out;
    out << "fresco-params 1\n";
    out << "layout " << params.layout.input_dim;
    for (int h : params.layout.hidden_dims) out << ' ' << h;
    out << '\n';
    out << "actor " << params.actor.size() << '\n';
    for (double v : params.actor) out << fmt_exact(v) << '\n';
    out << "critic " << params.critic.size() << '\n';
    for (double v : params.critic) out << fmt_exact(v) << '\n';
    return out.str();
}

AgentParams params_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    int version;
    if (!(in >> word >> version) || word != "fresco-params" || version != 1)
        throw std::runtime_error("bad params header");
    if (!(in >> word) || word != "layout") throw std::runtime_error("missing layout line");
    std::string rest;
    std::getline(in, rest);
    std::istringstream dims(rest);
    AgentParams p;
    dims >> p.layout.input_dim;
    p.layout.hidden_dims.clear();
    int d;
    while (dims >> d) p.layout.hidden_dims.push_back(d);

    auto read_block = [&in](const std::string& name, std::vector<double>& out) {
        std::string w;
        size_t count;
        if (!(in >> w >> count) || w != name)
            throw std::runtime_error("missing '" + name + "' block");
        out.resize(count);
        for (size_t i = 0; i < count; ++i)
            if (!(in >> out[i])) throw std::runtime_error("truncated '" + name + "' block");
    };
    read_block("actor", p.actor);
    read_block("critic", p.critic);
    p.validate();
    return p;
}

}  // namespace fresco
