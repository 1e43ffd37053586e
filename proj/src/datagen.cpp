#include "fresco/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "fresco/csv.hpp"

namespace fresco {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Morning bump at 7, evening peak at 19, overnight lull.
constexpr std::array<double, kStepsPerDay> kFamilyBase = {
    0.10, 0.05, 0.00, 0.00, 0.05, 0.20, 0.60, 1.00, 0.70, 0.45, 0.35, 0.30,
    0.35, 0.30, 0.30, 0.35, 0.45, 0.65, 0.90, 1.00, 0.85, 0.60, 0.35, 0.20};

// Late risers; consumption builds through the evening.
constexpr std::array<double, kStepsPerDay> kTeenagersBase = {
    0.45, 0.30, 0.15, 0.05, 0.00, 0.00, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30,
    0.35, 0.40, 0.50, 0.70, 0.90, 0.95, 1.00, 1.00, 1.00, 0.95, 0.80, 0.60};

// Elevated through working hours.
constexpr std::array<double, kStepsPerDay> kHomeBusinessBase = {
    0.10, 0.05, 0.00, 0.00, 0.00, 0.05, 0.15, 0.30, 0.60, 0.90, 1.00, 1.00,
    0.95, 0.95, 1.00, 1.00, 0.95, 0.85, 0.60, 0.50, 0.40, 0.30, 0.20, 0.15};

}  // namespace

const char* to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Family: return "family";
        case ProfileKind::Teenagers: return "teenagers";
        case ProfileKind::HomeBusiness: return "home_business";
    }
    throw std::invalid_argument("unknown profile kind");
}

ProfileKind profile_kind_from_string(const std::string& name) {
    if (name == "family") return ProfileKind::Family;
    if (name == "teenagers") return ProfileKind::Teenagers;
    if (name == "home_business") return ProfileKind::HomeBusiness;
    throw std::invalid_argument("unknown load profile '" + name + "'");
}

const std::array<double, kStepsPerDay>& load_base_table(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Family: return kFamilyBase;
        case ProfileKind::Teenagers: return kTeenagersBase;
        case ProfileKind::HomeBusiness: return kHomeBusinessBase;
    }
    throw std::invalid_argument("unknown profile kind");
}

void PvConfig::validate() const {
    require(peak >= 0.0 && peak <= 1.0, "pv peak must lie in [0,1]");
    require(noise_std >= 0.0, "pv noise_std must be >= 0");
    require(std::isfinite(noise_mean), "pv noise_mean must be finite");
}

void LoadConfig::validate() const {
    require(peak >= 0.0 && peak <= 1.0, "load peak must lie in [0,1]");
    require(constant_fraction >= 0.0 && constant_fraction <= 1.0,
            "load constant_fraction must lie in [0,1]");
    require(noise_std >= 0.0, "load noise_std must be >= 0");
    require(std::isfinite(noise_mean), "load noise_mean must be finite");
}

std::array<double, kStepsPerDay> GridConfig::default_gas_profile() {
    // Trapezoid: base 0.2 overnight, ramp to 0.8 over steps 6-10,
    // plateau to step 20, ramp back down.
    std::array<double, kStepsPerDay> p{};
    for (int t = 0; t < kStepsPerDay; ++t) {
        if (t <= 6) p[t] = 0.2;
        else if (t <= 10) p[t] = 0.2 + 0.15 * (t - 6);
        else if (t <= 20) p[t] = 0.8;
        else p[t] = 0.8 - 0.15 * (t - 20);
    }
    return p;
}

void GridConfig::validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(in01(nuclear_rate), "nuclear_rate must lie in [0,1]");
    require(in01(nuclear_emission), "nuclear_emission must lie in [0,1]");
    require(in01(gas_rate), "gas_rate must lie in [0,1]");
    require(in01(gas_emission), "gas_emission must lie in [0,1]");
    require(in01(nuclear_ratio), "nuclear_ratio must lie in [0,1]");
    for (double g : gas_profile) require(in01(g), "gas_profile values must lie in [0,1]");
    for (double g : gas_profile)
        require(nuclear_ratio + g > 0.0, "total generation must be positive at every step");
}

std::vector<double> generate_pv(const PvConfig& cfg, int steps, Rng& rng) {
    cfg.validate();
    require(steps >= 1, "steps must be >= 1");
    std::vector<double> pv(steps);
    for (int t = 0; t < steps; ++t) {
        double base = std::max(0.0, std::sin(kPi * (t % kStepsPerDay) / kStepsPerDay));
        double eps = rng.normal(cfg.noise_mean, cfg.noise_std);
        pv[t] = clamp01(cfg.peak * base + eps);
    }
    return pv;
}

std::vector<double> generate_load(const LoadConfig& cfg, int steps, Rng& rng) {
    cfg.validate();
    require(steps >= 1, "steps must be >= 1");
    const auto& raw = load_base_table(cfg.profile_kind);
    // Rescale the unit table so max(base + constant_fraction) == 1 and the
    // noiseless series peak equals cfg.peak.
    double scale = 1.0 - cfg.constant_fraction;
    std::vector<double> load(steps);
    for (int t = 0; t < steps; ++t) {
        double base = raw[t % kStepsPerDay] * scale;
        double eps = rng.normal(cfg.noise_mean, cfg.noise_std);
        load[t] = clamp01(cfg.peak * base + cfg.constant_fraction * cfg.peak + eps);
    }
    return load;
}

GridSeries generate_grid(const GridConfig& cfg, int steps) {
    cfg.validate();
    require(steps >= 1, "steps must be >= 1");
    GridSeries out;
    out.price.resize(steps);
    out.carbon.resize(steps);
    for (int t = 0; t < steps; ++t) {
        double gas = cfg.gas_profile[t % kStepsPerDay];
        double share = cfg.nuclear_ratio / (cfg.nuclear_ratio + gas);
        out.price[t] = share * cfg.nuclear_rate + (1.0 - share) * cfg.gas_rate;
        out.carbon[t] = share * cfg.nuclear_emission + (1.0 - share) * cfg.gas_emission;
    }
    return out;
}

DayData generate_day(const PvConfig& pv, const LoadConfig& load, const GridConfig& grid,
                     int steps, std::uint64_t seed) {
    Rng pv_rng(derive_seed(seed, {1}));
    Rng load_rng(derive_seed(seed, {2}));
    DayData day;
    day.pv = generate_pv(pv, steps, pv_rng);
    day.load = generate_load(load, steps, load_rng);
    GridSeries gs = generate_grid(grid, steps);
    day.price = std::move(gs.price);
    day.carbon = std::move(gs.carbon);
    return day;
}

std::uint64_t day_hash(const DayData& day) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const std::vector<double>& v) {
        for (double x : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, sizeof(bits));
            for (int i = 0; i < 8; ++i) {
                h ^= (bits >> (8 * i)) & 0xFF;
                h *= 0x100000001b3ULL;
            }
        }
    };
    mix(day.pv);
    mix(day.load);
    mix(day.price);
    mix(day.carbon);
    return h;
}

std::string day_to_csv(const DayData& day) {
    std::ostringstream out;
    out << "t,pv,load,price,carbon\n";
    for (int t = 0; t < day.steps(); ++t) {
        out << t << ',' << fmt_fixed(day.pv[t], 6) << ',' << fmt_fixed(day.load[t], 6) << ','
            << fmt_fixed(day.price[t], 6) << ',' << fmt_fixed(day.carbon[t], 6) << '\n';
    }
    return out.str();
}

DayData day_from_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || line != "t,pv,load,price,carbon")
        throw std::runtime_error("unexpected day CSV header");
    DayData day;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 5) throw std::runtime_error("malformed day CSV row");
        day.pv.push_back(std::stod(fields[1]));
        day.load.push_back(std::stod(fields[2]));
        day.price.push_back(std::stod(fields[3]));
        day.carbon.push_back(std::stod(fields[4]));
    }
    return day;
}

}  // namespace fresco
