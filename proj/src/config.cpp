#include "fresco/config.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "fresco/csv.hpp"

namespace fresco {

using nlohmann::json;

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

}  // namespace

void to_json(json& j, const PvConfig& c) {
    j = json{{"peak", c.peak}, {"noise_mean", c.noise_mean}, {"noise_std", c.noise_std}};
}
void from_json(const json& j, PvConfig& c) {
    maybe(j, "peak", c.peak);
    maybe(j, "noise_mean", c.noise_mean);
    maybe(j, "noise_std", c.noise_std);
}

void to_json(json& j, const LoadConfig& c) {
    j = json{{"profile", to_string(c.profile_kind)},
             {"peak", c.peak},
             {"constant_fraction", c.constant_fraction},
             {"noise_mean", c.noise_mean},
             {"noise_std", c.noise_std}};
}
void from_json(const json& j, LoadConfig& c) {
    if (auto it = j.find("profile"); it != j.end())
        c.profile_kind = profile_kind_from_string(it->get<std::string>());
    maybe(j, "peak", c.peak);
    maybe(j, "constant_fraction", c.constant_fraction);
    maybe(j, "noise_mean", c.noise_mean);
    maybe(j, "noise_std", c.noise_std);
}

void to_json(json& j, const GridConfig& c) {
    j = json{{"nuclear_rate", c.nuclear_rate},     {"nuclear_emission", c.nuclear_emission},
             {"gas_rate", c.gas_rate},             {"gas_emission", c.gas_emission},
             {"nuclear_ratio", c.nuclear_ratio},   {"gas_profile", c.gas_profile}};
}
void from_json(const json& j, GridConfig& c) {
    maybe(j, "nuclear_rate", c.nuclear_rate);
    maybe(j, "nuclear_emission", c.nuclear_emission);
    maybe(j, "gas_rate", c.gas_rate);
    maybe(j, "gas_emission", c.gas_emission);
    maybe(j, "nuclear_ratio", c.nuclear_ratio);
    maybe(j, "gas_profile", c.gas_profile);
}

void to_json(json& j, const BatteryConfig& c) {
    j = json{{"capacity", c.capacity},
             {"max_power", c.max_power},
             {"charge_efficiency", c.charge_efficiency},
             {"discharge_efficiency", c.discharge_efficiency},
             {"initial_soc", c.initial_soc}};
}
void from_json(const json& j, BatteryConfig& c) {
    maybe(j, "capacity", c.capacity);
    maybe(j, "max_power", c.max_power);
    maybe(j, "charge_efficiency", c.charge_efficiency);
    maybe(j, "discharge_efficiency", c.discharge_efficiency);
    maybe(j, "initial_soc", c.initial_soc);
}

void to_json(json& j, const RewardWeights& c) {
    j = json{{"price_weight", c.price_weight}, {"emission_weight", c.emission_weight}};
}
void from_json(const json& j, RewardWeights& c) {
    maybe(j, "price_weight", c.price_weight);
    maybe(j, "emission_weight", c.emission_weight);
}

void to_json(json& j, const NetLayout& c) {
    j = json{{"input_dim", c.input_dim}, {"hidden_dims", c.hidden_dims}};
}
void from_json(const json& j, NetLayout& c) {
    maybe(j, "input_dim", c.input_dim);
    maybe(j, "hidden_dims", c.hidden_dims);
}

void to_json(json& j, const TrainConfig& c) {
    j = json{{"discount", c.discount},
             {"actor_lr", c.actor_lr},
             {"critic_lr", c.critic_lr},
             {"entropy_coef", c.entropy_coef},
             {"episodes_per_update", c.episodes_per_update},
             {"grad_clip", c.grad_clip}};
}
void from_json(const json& j, TrainConfig& c) {
    maybe(j, "discount", c.discount);
    maybe(j, "actor_lr", c.actor_lr);
    maybe(j, "critic_lr", c.critic_lr);
    maybe(j, "entropy_coef", c.entropy_coef);
    maybe(j, "episodes_per_update", c.episodes_per_update);
    maybe(j, "grad_clip", c.grad_clip);
}

void to_json(json& j, const FederationConfig& c) {
    j = json{{"sync_interval", c.sync_interval},
             {"rounds", c.rounds},
             {"client_weights", c.client_weights}};
}
void from_json(const json& j, FederationConfig& c) {
    maybe(j, "sync_interval", c.sync_interval);
    maybe(j, "rounds", c.rounds);
    maybe(j, "client_weights", c.client_weights);
}

void to_json(json& j, const HouseholdSpec& c) {
    j = json{{"household_id", c.household_id},
             {"microgrid_id", c.microgrid_id},
             {"pv", c.pv},
             {"load", c.load},
             {"battery", c.battery}};
}
void from_json(const json& j, HouseholdSpec& c) {
    maybe(j, "household_id", c.household_id);
    maybe(j, "microgrid_id", c.microgrid_id);
    maybe(j, "pv", c.pv);
    maybe(j, "load", c.load);
    maybe(j, "battery", c.battery);
}

void to_json(json& j, const SplitConfig& c) {
    j = json{{"train", c.train}, {"validation", c.validation}, {"test", c.test}};
}
void from_json(const json& j, SplitConfig& c) {
    maybe(j, "train", c.train);
    maybe(j, "validation", c.validation);
    maybe(j, "test", c.test);
}

void to_json(json& j, const RunConfig& c) {
    j = json{{"master_seed", c.master_seed},
             {"out_dir", c.out_dir},
             {"episode_steps", c.episode_steps},
             {"eval_days", c.eval_days},
             {"write_traces", c.write_traces},
             {"weights", c.weights},
             {"grid", c.grid},
             {"layout", c.layout},
             {"train", c.train},
             {"federation", c.federation},
             {"households", c.households},
             {"split", c.split}};
}
void from_json(const json& j, RunConfig& c) {
    maybe(j, "master_seed", c.master_seed);
    maybe(j, "out_dir", c.out_dir);
    maybe(j, "episode_steps", c.episode_steps);
    maybe(j, "eval_days", c.eval_days);
    maybe(j, "write_traces", c.write_traces);
    maybe(j, "weights", c.weights);
    maybe(j, "grid", c.grid);
    maybe(j, "layout", c.layout);
    maybe(j, "train", c.train);
    maybe(j, "federation", c.federation);
    maybe(j, "households", c.households);
    maybe(j, "split", c.split);
}

void RunConfig::validate() const {
    if (episode_steps < 1) throw std::invalid_argument("episode_steps must be >= 1");
    if (eval_days < 1) throw std::invalid_argument("eval_days must be >= 1");
    weights.validate();
    grid.validate();
    layout.validate();
    train.validate();
    federation.validate();
    if (households.empty()) throw std::invalid_argument("config lists no households");
    std::set<int> ids;
    for (const HouseholdSpec& h : households) {
        if (!ids.insert(h.household_id).second)
            throw std::invalid_argument("duplicate household_id " +
                                        std::to_string(h.household_id));
        h.pv.validate();
        h.load.validate();
        h.battery.validate();
    }
    auto check_split = [&](const std::vector<int>& part, const char* name) {
        std::set<int> seen;
        for (int id : part) {
            if (!ids.count(id))
                throw std::invalid_argument(std::string(name) + " split lists unknown household " +
                                            std::to_string(id));
            if (!seen.insert(id).second)
                throw std::invalid_argument(std::string(name) + " split repeats household " +
                                            std::to_string(id));
        }
        return seen;
    };
    std::set<int> tr = check_split(split.train, "train");
    std::set<int> va = check_split(split.validation, "validation");
    std::set<int> te = check_split(split.test, "test");
    if (tr.empty()) throw std::invalid_argument("train split is empty");
    for (int id : va)
        if (tr.count(id))
            throw std::invalid_argument("household " + std::to_string(id) +
                                        " is in both train and validation");
    for (int id : te)
        if (tr.count(id) || va.count(id))
            throw std::invalid_argument("household " + std::to_string(id) +
                                        " is in test and another split");
    if (!federation.client_weights.empty() &&
        federation.client_weights.size() != split.train.size())
        throw std::invalid_argument("client_weights count does not match train split size");
}

const HouseholdSpec& RunConfig::household(int household_id) const {
    for (const HouseholdSpec& h : households)
        if (h.household_id == household_id) return h;
    throw std::invalid_argument("unknown household_id " + std::to_string(household_id));
}

RunConfig default_run_config() {
    RunConfig cfg;
    // Six microgrids: two of three train households, two of three
    // validation households, two of five test households each. Load
    // peaks sit above PV peaks so every household is a net importer
    // over a noiseless day.
    auto microgrid_of = [](int id) {
        if (id < 6) return id / 3;
        if (id < 12) return 2 + (id - 6) / 3;
        return 4 + (id - 12) / 5;
    };
    for (int id = 0; id < 22; ++id) {
        HouseholdSpec h;
        h.household_id = id;
        h.microgrid_id = microgrid_of(id);
        h.pv.peak = 0.55 + 0.05 * (id % 4);
        h.load.profile_kind = static_cast<ProfileKind>(id % 3);
        h.load.peak = 0.80 + 0.05 * (id % 3);
        cfg.households.push_back(h);
    }
    for (int id = 0; id < 6; ++id) cfg.split.train.push_back(id);
    for (int id = 6; id < 12; ++id) cfg.split.validation.push_back(id);
    for (int id = 12; id < 22; ++id) cfg.split.test.push_back(id);
    return cfg;
}

HouseholdScenario scenario_for(const RunConfig& cfg, int household_id) {
    const HouseholdSpec& h = cfg.household(household_id);
    return HouseholdScenario{h.household_id, h.microgrid_id, h.pv, h.load, h.battery};
}

std::vector<HouseholdScenario> scenarios_for(const RunConfig& cfg,
                                             const std::vector<int>& household_ids) {
    std::vector<HouseholdScenario> out;
    out.reserve(household_ids.size());
    for (int id : household_ids) out.push_back(scenario_for(cfg, id));
    return out;
}

std::string run_config_to_json(const RunConfig& cfg) {
    json j = cfg;
    return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
    json j = json::parse(text);
    // Absent keys keep the default experiment, so a partial config only
    // overrides what it names.
    RunConfig cfg = default_run_config();
    j.get_to(cfg);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return run_config_from_json(read_text_file(path));
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
    write_text_file(path, run_config_to_json(cfg));
}

}  // namespace fresco
