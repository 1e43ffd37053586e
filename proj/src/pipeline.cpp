#include "fresco/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fresco/csv.hpp"
#include "fresco/federation.hpp"
#include "fresco/metrics.hpp"
#include "fresco/oracle.hpp"

namespace fresco {

namespace fs = std::filesystem;
using nlohmann::json;

namespace paths {

std::string resolved_config(const RunConfig& cfg) { return cfg.out_dir + "/resolved_config.json"; }
std::string data_dir(const RunConfig& cfg) { return cfg.out_dir + "/data"; }
std::string manifest(const RunConfig& cfg) { return data_dir(cfg) + "/manifest.json"; }
std::string day_csv(const RunConfig& cfg, int household_id, int day) {
    return data_dir(cfg) + "/household_" + std::to_string(household_id) + "_day_" +
           std::to_string(day) + ".csv";
}
std::string train_dir(const RunConfig& cfg, const std::string& mode) {
    return cfg.out_dir + "/train/" + mode;
}
std::string rounds_csv(const RunConfig& cfg, const std::string& mode) {
    return train_dir(cfg, mode) + "/rounds.csv";
}
std::string checkpoint_dir(const RunConfig& cfg, const std::string& mode) {
    return train_dir(cfg, mode) + "/checkpoints";
}
std::string initial_params(const RunConfig& cfg, const std::string& mode) {
    return checkpoint_dir(cfg, mode) + "/initial.params";
}
std::string round_params(const RunConfig& cfg, const std::string& mode, int round, int client_id) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "/round_%03d_client_%d.params", round, client_id);
    return checkpoint_dir(cfg, mode) + buf;
}
std::string final_client_params(const RunConfig& cfg, const std::string& mode, int client_id) {
    return checkpoint_dir(cfg, mode) + "/final_client_" + std::to_string(client_id) + ".params";
}
std::string final_params(const RunConfig& cfg, const std::string& mode) {
    return checkpoint_dir(cfg, mode) + "/final.params";
}
std::string baseline_dir(const RunConfig& cfg) { return cfg.out_dir + "/baseline"; }
std::string solution_csv(const RunConfig& cfg, int household_id, int day) {
    return baseline_dir(cfg) + "/solutions/h" + std::to_string(household_id) + "_day" +
           std::to_string(day) + ".csv";
}
std::string baseline_reports(const RunConfig& cfg) { return baseline_dir(cfg) + "/reports.csv"; }
std::string eval_dir(const RunConfig& cfg, const std::string& arm) {
    return cfg.out_dir + "/eval/" + arm;
}
std::string eval_reports(const RunConfig& cfg, const std::string& arm) {
    return eval_dir(cfg, arm) + "/reports.csv";
}
std::string eval_trace(const RunConfig& cfg, const std::string& arm, int household_id, int day) {
    return eval_dir(cfg, arm) + "/traces/h" + std::to_string(household_id) + "_day" +
           std::to_string(day) + ".csv";
}
std::string report_dir(const RunConfig& cfg) { return cfg.out_dir + "/report"; }
std::string comparison_csv(const RunConfig& cfg) { return report_dir(cfg) + "/comparison.csv"; }
std::string comparison_txt(const RunConfig& cfg) { return report_dir(cfg) + "/comparison.txt"; }
std::string deltas_csv(const RunConfig& cfg) { return report_dir(cfg) + "/deltas.csv"; }

}  // namespace paths

DayData eval_day(const RunConfig& cfg, const HouseholdSpec& h, int day_index) {
    std::uint64_t seed =
        derive_seed(cfg.master_seed, {kSeedEvalDay, static_cast<std::uint64_t>(h.household_id),
                                      static_cast<std::uint64_t>(day_index)});
    return generate_day(h.pv, h.load, cfg.grid, cfg.episode_steps, seed);
}

std::string report_rows_to_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << "arm,split,household_id,microgrid_id,day_index,day_hash,steps,total_reward,"
           "mean_reward,price_score,emission_score\n";
    for (const ReportRow& r : rows) {
        const EpisodeReport& rep = r.report;
        double mean_reward = rep.steps() > 0 ? rep.total_reward / rep.steps() : 0.0;
        out << r.arm << ',' << r.split << ',' << rep.household_id << ',' << rep.microgrid_id
            << ',' << r.day_index << ',' << rep.day_hash << ',' << rep.steps() << ','
            << fmt_exact(rep.total_reward) << ',' << fmt_exact(mean_reward) << ','
            << fmt_exact(rep.price_score) << ',' << fmt_exact(rep.emission_score) << '\n';
    }
    return out.str();
}

std::vector<ReportRow> report_rows_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "arm,split,household_id,microgrid_id,day_index,day_hash,steps,total_reward,"
                "mean_reward,price_score,emission_score")
        throw std::runtime_error("unexpected reports CSV header");
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 11) throw std::runtime_error("malformed reports CSV row");
        ReportRow r;
        r.arm = f[0];
        r.split = f[1];
        r.report.household_id = std::stoi(f[2]);
        r.report.microgrid_id = std::stoi(f[3]);
        r.day_index = std::stoi(f[4]);
        r.report.day_hash = std::stoull(f[5]);
        int steps = std::stoi(f[6]);
        r.report.total_reward = std::stod(f[7]);
        r.report.price_score = std::stod(f[9]);
        r.report.emission_score = std::stod(f[10]);
        // Blank records so steps() reports the episode length; per-step
        // values live in the trace files, not here.
        r.report.trace.resize(steps);
        rows.push_back(r);
    }
    return rows;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path());
    write_text_file(path, content);
}

void write_resolved_config(const RunConfig& cfg) {
    write_file(paths::resolved_config(cfg), run_config_to_json(cfg));
}

std::string split_of(const RunConfig& cfg, int household_id) {
    auto in = [&](const std::vector<int>& ids) {
        return std::find(ids.begin(), ids.end(), household_id) != ids.end();
    };
    if (in(cfg.split.train)) return "train";
    if (in(cfg.split.validation)) return "validation";
    if (in(cfg.split.test)) return "test";
    return "none";
}

std::vector<int> scored_households(const RunConfig& cfg) {
    std::vector<int> ids = cfg.split.train;
    ids.insert(ids.end(), cfg.split.test.begin(), cfg.split.test.end());
    return ids;
}

TrainingSetup training_setup(const RunConfig& cfg) {
    TrainingSetup setup;
    setup.train_scenarios = scenarios_for(cfg, cfg.split.train);
    setup.validation_scenarios = scenarios_for(cfg, cfg.split.validation);
    setup.grid = cfg.grid;
    setup.episode_steps = cfg.episode_steps;
    setup.weights = cfg.weights;
    setup.layout = cfg.layout;
    return setup;
}

}  // namespace

int cmd_generate(const RunConfig& cfg, int days, std::ostream& err) {
    try {
        cfg.validate();
        if (days < 1) throw std::invalid_argument("days must be >= 1");
        write_resolved_config(cfg);
        fs::create_directories(paths::data_dir(cfg));
        json files = json::array();
        for (const HouseholdSpec& h : cfg.households) {
            for (int d = 0; d < days; ++d) {
                std::uint64_t seed = derive_seed(
                    cfg.master_seed, {kSeedDataDay, static_cast<std::uint64_t>(h.household_id),
                                      static_cast<std::uint64_t>(d)});
                DayData day = generate_day(h.pv, h.load, cfg.grid, cfg.episode_steps, seed);
                std::string path = paths::day_csv(cfg, h.household_id, d);
                write_file(path, day_to_csv(day));
                files.push_back(json{{"path", fs::path(path).filename().string()},
                                     {"household_id", h.household_id},
                                     {"day", d},
                                     {"seed", seed},
                                     {"day_hash", day_hash(day)}});
            }
        }
        json manifest{{"master_seed", cfg.master_seed},
                      {"days", days},
                      {"episode_steps", cfg.episode_steps},
                      {"files", files}};
        write_file(paths::manifest(cfg), manifest.dump(2) + "\n");
        return 0;
    } catch (const std::exception& e) {
        err << "generate: " << e.what() << "\n";
        return 1;
    }
}

int cmd_train(const RunConfig& cfg, const std::string& mode, std::ostream& err) {
    try {
        cfg.validate();
        if (mode != "federated" && mode != "isolated")
            throw std::invalid_argument("mode must be 'federated' or 'isolated'");
        write_resolved_config(cfg);
        fs::create_directories(paths::checkpoint_dir(cfg, mode));

        TrainingSetup setup = training_setup(cfg);
        AgentParams initial =
            init_params(cfg.layout, derive_seed(cfg.master_seed, {kSeedInit}));
        write_file(paths::initial_params(cfg, mode), params_to_text(initial));

        RoundCallback on_round = [&](int round, const std::vector<ClientState>& clients,
                                     const AgentParams*) {
            for (const ClientState& c : clients)
                write_file(paths::round_params(cfg, mode, round, c.client_id),
                           params_to_text(c.params));
        };

        TrainingOutcome outcome =
            mode == "federated"
                ? run_federated_training(setup, cfg.train, cfg.federation, cfg.master_seed,
                                         on_round)
                : run_isolated_training(setup, cfg.train, cfg.federation, cfg.master_seed,
                                        on_round);

        write_file(paths::rounds_csv(cfg, mode), round_log_to_csv(outcome.round_log));
        // A zero-round run trains nothing: the initial checkpoint is the
        // whole result, and evaluate will report the finals as missing.
        if (cfg.federation.rounds > 0) {
            for (const ClientState& c : outcome.clients)
                write_file(paths::final_client_params(cfg, mode, c.client_id),
                           params_to_text(c.params));
            write_file(paths::final_params(cfg, mode), params_to_text(outcome.final_params));
        }

        if (outcome.aborted_round >= 0) {
            err << "train: aborted at round " << outcome.aborted_round << " (" << outcome.error
                << "); checkpoints rolled back to the last average\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        err << "train: " << e.what() << "\n";
        return 1;
    }
}

int cmd_baseline(const RunConfig& cfg, std::ostream& err) {
    try {
        cfg.validate();
        write_resolved_config(cfg);
        fs::create_directories(paths::baseline_dir(cfg) + "/solutions");
        std::vector<ReportRow> rows;
        for (int id : scored_households(cfg)) {
            const HouseholdSpec& h = cfg.household(id);
            HouseholdScenario scenario = scenario_for(cfg, id);
            for (int d = 0; d < cfg.eval_days; ++d) {
                DayData day = eval_day(cfg, h, d);
                DispatchProblem problem{day, h.battery, cfg.weights};
                DispatchSolution sol = solve_lp(problem);
                write_file(paths::solution_csv(cfg, id, d), solution_to_csv(sol, day, cfg.weights));
                EpisodeReport rep = replay(sol, scenario, day, cfg.weights);
                rows.push_back({kArmOracle, split_of(cfg, id), d, std::move(rep)});
            }
        }
        write_file(paths::baseline_reports(cfg), report_rows_to_csv(rows));
        return 0;
    } catch (const std::exception& e) {
        err << "baseline: " << e.what() << "\n";
        return 1;
    }
}

namespace {

AgentParams load_params_file(const std::string& path) {
    return params_from_text(read_text_file(path));
}

// The isolated arm has one policy per train household; other households
// are served round-robin by position in their split, mirroring how a
// fleet without parameter sharing would assign spare capacity.
AgentParams isolated_params_for(const RunConfig& cfg,
                                const std::map<int, AgentParams>& per_client, int household_id) {
    auto it = per_client.find(household_id);
    if (it != per_client.end()) return it->second;
    const std::vector<int>& test = cfg.split.test;
    size_t pos = std::find(test.begin(), test.end(), household_id) - test.begin();
    int owner = cfg.split.train[pos % cfg.split.train.size()];
    return per_client.at(owner);
}

}  // namespace

int cmd_evaluate(const RunConfig& cfg, std::ostream& err) {
    try {
        cfg.validate();
        write_resolved_config(cfg);

        std::vector<std::string> missing;
        std::string fed_path = paths::final_params(cfg, "federated");
        if (!fs::exists(fed_path)) missing.push_back(fed_path);
        std::map<int, AgentParams> iso_params;
        for (int id : cfg.split.train) {
            std::string p = paths::final_client_params(cfg, "isolated", id);
            if (!fs::exists(p))
                missing.push_back(p);
            else
                iso_params.emplace(id, load_params_file(p));
        }
        if (!missing.empty()) {
            for (const std::string& m : missing) err << "evaluate: missing artifact " << m << "\n";
            return 1;
        }
        AgentParams fed = load_params_file(fed_path);

        struct Arm {
            std::string name;
            std::vector<ReportRow> rows;
        };
        std::vector<Arm> arms{{kArmBase, {}}, {kArmIsolated, {}}, {kArmFederated, {}}};

        for (int id : scored_households(cfg)) {
            const HouseholdSpec& h = cfg.household(id);
            HouseholdScenario scenario = scenario_for(cfg, id);
            AgentParams iso = isolated_params_for(cfg, iso_params, id);
            for (int d = 0; d < cfg.eval_days; ++d) {
                DayData day = eval_day(cfg, h, d);
                Environment env(scenario, day);
                std::string split = split_of(cfg, id);

                EpisodeReport base = env.run_episode(
                    [](const EnvState&, const Observation&) { return 0.0; }, cfg.weights);
                EpisodeReport iso_rep = env.run_episode(
                    [&](const EnvState&, const Observation& obs) {
                        return act_mean(iso, obs).action;
                    },
                    cfg.weights);
                EpisodeReport fed_rep = env.run_episode(
                    [&](const EnvState&, const Observation& obs) {
                        return act_mean(fed, obs).action;
                    },
                    cfg.weights);

                if (cfg.write_traces) {
                    write_file(paths::eval_trace(cfg, kArmBase, id, d), trace_to_csv(base.trace));
                    write_file(paths::eval_trace(cfg, kArmIsolated, id, d),
                               trace_to_csv(iso_rep.trace));
                    write_file(paths::eval_trace(cfg, kArmFederated, id, d),
                               trace_to_csv(fed_rep.trace));
                }
                arms[0].rows.push_back({kArmBase, split, d, std::move(base)});
                arms[1].rows.push_back({kArmIsolated, split, d, std::move(iso_rep)});
                arms[2].rows.push_back({kArmFederated, split, d, std::move(fed_rep)});
            }
        }
        for (const Arm& arm : arms)
            write_file(paths::eval_reports(cfg, arm.name), report_rows_to_csv(arm.rows));
        return 0;
    } catch (const std::exception& e) {
        err << "evaluate: " << e.what() << "\n";
        return 1;
    }
}

namespace {

ArmReports arm_reports(const std::vector<ReportRow>& rows) {
    ArmReports arm;
    for (const ReportRow& r : rows) {
        if (r.split == "train") arm.train.push_back(r.report);
        if (r.split == "test") arm.test.push_back(r.report);
    }
    return arm;
}

}  // namespace

int cmd_report(const RunConfig& cfg, std::ostream& err) {
    try {
        cfg.validate();

        std::vector<std::string> needed = {
            paths::baseline_reports(cfg), paths::eval_reports(cfg, kArmBase),
            paths::eval_reports(cfg, kArmIsolated), paths::eval_reports(cfg, kArmFederated)};
        std::vector<std::string> missing;
        for (const std::string& p : needed)
            if (!fs::exists(p)) missing.push_back(p);
        if (!missing.empty()) {
            for (const std::string& m : missing) err << "report: missing artifact " << m << "\n";
            return 1;
        }

        std::vector<ReportRow> oracle_rows = report_rows_from_csv(read_text_file(needed[0]));
        std::vector<ReportRow> base_rows = report_rows_from_csv(read_text_file(needed[1]));
        std::vector<ReportRow> iso_rows = report_rows_from_csv(read_text_file(needed[2]));
        std::vector<ReportRow> fed_rows = report_rows_from_csv(read_text_file(needed[3]));

        write_resolved_config(cfg);
        fs::create_directories(paths::report_dir(cfg));

        ComparisonTable table = comparison_table(arm_reports(oracle_rows), arm_reports(iso_rows),
                                                 arm_reports(fed_rows));
        write_file(paths::comparison_csv(cfg), table.to_csv());
        write_file(paths::comparison_txt(cfg), table.to_text());

        // Per-household deltas of the federated arm against the
        // no-battery base, day by day, then averaged over eval days.
        std::map<std::pair<int, int>, const EpisodeReport*> fed_by_key;
        for (const ReportRow& r : fed_rows)
            fed_by_key[{r.report.household_id, r.day_index}] = &r.report;
        std::map<int, std::pair<DeltaReport, int>> per_household;
        for (const ReportRow& r : base_rows) {
            auto it = fed_by_key.find({r.report.household_id, r.day_index});
            if (it == fed_by_key.end())
                throw std::runtime_error("report: federated arm is missing household " +
                                         std::to_string(r.report.household_id) + " day " +
                                         std::to_string(r.day_index));
            DeltaReport d = delta(r.report, *it->second);
            auto& [acc, count] = per_household[d.household_id];
            if (count == 0) acc = d;
            else {
                acc.p_delta += d.p_delta;
                acc.c_delta += d.c_delta;
            }
            ++count;
        }
        std::vector<DeltaReport> household_deltas;
        for (auto& [id, entry] : per_household) {
            DeltaReport d = entry.first;
            d.p_delta /= entry.second;
            d.c_delta /= entry.second;
            household_deltas.push_back(d);
        }
        std::vector<DeltaReport> all = household_deltas;
        std::vector<DeltaReport> mg = aggregate(household_deltas, AggregationLevel::Microgrid);
        std::vector<DeltaReport> dist =
            aggregate(household_deltas, AggregationLevel::Distributor);
        all.insert(all.end(), mg.begin(), mg.end());
        all.insert(all.end(), dist.begin(), dist.end());
        write_file(paths::deltas_csv(cfg), deltas_to_csv(all));
        return 0;
    } catch (const std::exception& e) {
        err << "report: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace fresco
