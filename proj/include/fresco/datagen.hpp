#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fresco/rng.hpp"

namespace fresco {

// One simulated day is 24 hourly steps; longer horizons repeat the
// daily pattern with fresh noise.
inline constexpr int kStepsPerDay = 24;

struct PvConfig {
    double peak = 0.7;        // plant scale in [0,1]
    double noise_mean = 0.0;
    double noise_std = 0.1;

    void validate() const;
};

enum class ProfileKind { Family, Teenagers, HomeBusiness };

const char* to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

struct LoadConfig {
    ProfileKind profile_kind = ProfileKind::Family;
    double peak = 0.6;               // peak consumption in [0,1]
    double constant_fraction = 0.2;  // always-on share of the peak
    double noise_mean = 0.0;
    double noise_std = 0.01;

    void validate() const;
};

// Two-source grid mix: nuclear runs at a constant ratio, gas follows a
// 24-step planned profile. Price and carbon intensity at each step are
// the generation-share-weighted mix of per-source rates.
struct GridConfig {
    double nuclear_rate = 0.4;
    double nuclear_emission = 0.05;
    double gas_rate = 0.8;
    double gas_emission = 0.9;
    double nuclear_ratio = 0.6;
    std::array<double, kStepsPerDay> gas_profile = default_gas_profile();

    static std::array<double, kStepsPerDay> default_gas_profile();
    void validate() const;
};

struct DayData {
    std::vector<double> pv;
    std::vector<double> load;
    std::vector<double> price;
    std::vector<double> carbon;

    int steps() const { return static_cast<int>(pv.size()); }
};

// Fixed 24-entry base tables for the three load profiles. Values are in
// [0,1] with at least one 0 and one 1 entry. Family peaks at steps 7 and
// 19, Teenagers through the evening (16-23), HomeBusiness over working
// hours (9-17).
const std::array<double, kStepsPerDay>& load_base_table(ProfileKind kind);

// pv[t] = clamp(peak * max(0, sin(pi*(t mod 24)/24)) + noise, 0, 1).
// The noiseless base peaks at step 12 of each day.
std::vector<double> generate_pv(const PvConfig& cfg, int steps, Rng& rng);

// load[t] = clamp(peak * base[t mod 24] + constant_fraction * peak + noise, 0, 1)
// where base is the profile table rescaled by (1 - constant_fraction) so
// the noiseless series peaks at exactly cfg.peak and never falls below
// constant_fraction * peak.
std::vector<double> generate_load(const LoadConfig& cfg, int steps, Rng& rng);

struct GridSeries {
    std::vector<double> price;
    std::vector<double> carbon;
};

// Noiseless mix of the two sources; 24-periodic.
GridSeries generate_grid(const GridConfig& cfg, int steps);

// Composes the three generators. PV and load noise use independent
// sub-streams derived from the seed, so identical inputs give
// bit-identical output regardless of the other series' configs.
DayData generate_day(const PvConfig& pv, const LoadConfig& load, const GridConfig& grid,
                     int steps, std::uint64_t seed);

// FNV-1a over the raw series bits; identifies a day realization.
std::uint64_t day_hash(const DayData& day);

// CSV with header t,pv,load,price,carbon at 6 decimal places.
std::string day_to_csv(const DayData& day);
DayData day_from_csv(const std::string& csv_text);

}  // namespace fresco
