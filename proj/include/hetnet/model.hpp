#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetnet/numerics.hpp"

namespace hetnet {

// The two sub-6GHz tiers are physical deployments; the mmWave deployment is
// split into a LoS and an NLoS tier that share the physical density and
// radio parameters but carry distinct path loss laws.
enum class TierId : int { Macro6G = 0, Small6G = 1, MmLoS = 2, MmNLoS = 3 };
inline constexpr int kTierCount = 4;
inline constexpr std::array<TierId, 4> kAllTiers = {TierId::Macro6G, TierId::Small6G,
                                                    TierId::MmLoS, TierId::MmNLoS};
inline bool is_mmwave(TierId k) { return k == TierId::MmLoS || k == TierId::MmNLoS; }
const char* tier_name(TierId k);  // macro / small / mm_los / mm_nlos

enum class Link { DL = 0, UL = 1 };
const char* link_name(Link v);  // dl / ul

// Per-tier parameters, all in SI linear units (W, Hz, per m^2, unitless
// gains). File-facing units live in RawConfig.
struct TierParams {
    double density = 0.0;      // BS density, per m^2
    double dl_power = 0.0;     // DL transmit power, W
    double intercept = 0.0;    // path loss intercept C_k at 1 m, linear
    double alpha = 0.0;        // path loss exponent
    double dl_bias = 1.0;      // DL association bias B_k, linear
    double ul_bias = 1.0;      // UL association bias B'_k, linear
    double pc_fraction = 0.0;  // fractional power control exponent (UL)
    double bandwidth = 0.0;    // Hz
    double bs_gain = 1.0;      // BS gain toward the served UE, linear
    double noise_power = 0.0;  // thermal noise + noise figure over bandwidth, W
};

// Sectorized mmWave beam: aligned links see the main lobe, interfering links
// the main lobe with probability beamwidth/2pi and the side lobe otherwise.
struct AntennaPattern {
    double main_gain = 1.0;  // linear
    double side_gain = 1.0;  // linear
    double beamwidth = 2.0 * 3.14159265358979323846;  // rad
    double main_prob() const { return beamwidth / (2.0 * 3.14159265358979323846); }
    double side_prob() const { return 1.0 - main_prob(); }
};

// LoS ball: a mmWave link of length r is line-of-sight with probability
// los_fraction inside los_radius and never beyond.
struct BlockageModel {
    double los_fraction = 0.0;
    double los_radius = 0.0;  // m
    double los_prob(double r) const { return r < los_radius ? los_fraction : 0.0; }
};

struct NetworkConfig {
    std::array<TierParams, kTierCount> tiers;
    AntennaPattern antenna;
    BlockageModel blockage;
    double ue_density = 0.0;  // per m^2
    double ue_power = 0.0;    // UE transmit power before power control, W
    numerics::QuadratureSpec quadrature;

    TierParams& tier(TierId k) { return tiers[static_cast<int>(k)]; }
    const TierParams& tier(TierId k) const { return tiers[static_cast<int>(k)]; }
};

// Checks structural invariants; returns one message per violation, each
// naming the offending field and the rule. Empty means valid.
std::vector<std::string> validate(const NetworkConfig& cfg);

// Effective signal constant of tier k: transmit power x BS gain x intercept
// (T_k for DL, T'_k for UL). The distance-dependent factors are excluded.
double effective_signal_constant(const NetworkConfig& cfg, TierId k, Link link);

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key-value configuration in file units (per-km^2 densities, dBm
// powers, dB gains/intercepts/biases, degrees, MHz). Section headers in the
// file are cosmetic grouping; keys are globally unique.
struct RawConfig {
    std::map<std::string, double> values;
};

RawConfig default_raw_config();  // Table defaults (sparse deployment)
RawConfig dense_raw_config();    // dense deployment variant
bool is_config_key(const std::string& key);
RawConfig parse_config_text(const std::string& text);
RawConfig load_config_file(const std::filesystem::path& path);
std::string serialize_config(const RawConfig& raw);

NetworkConfig build_config(const RawConfig& raw);
RawConfig raw_from_config(const NetworkConfig& cfg);
NetworkConfig table_default_config();
NetworkConfig dense_default_config();

// FNV-1a over the canonical serialization; stable across runs.
std::string config_digest(const RawConfig& raw);
std::string config_digest(const NetworkConfig& cfg);

}  // namespace hetnet
