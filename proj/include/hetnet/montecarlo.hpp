#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/coverage.hpp"

namespace hetnet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Physical deployments: the two sub-6GHz tiers plus one mmWave tier whose
// stations split into the LoS/NLoS logical tiers per user.
inline constexpr int kPhysicalTiers = 3;
int physical_tier(TierId k);  // Macro6G -> 0, Small6G -> 1, Mm* -> 2

// One realization of the network inside a square window centered on the
// origin; the probe user sits at the center. LoS flags are stored sparsely:
// a link longer than the blockage ball is never line-of-sight, so each row
// lists only the mmWave station indices that are LoS to that user.
struct Deployment {
    double window_side = 0.0;  // m
    std::array<std::vector<Vec2>, kPhysicalTiers> bs_points;
    std::vector<Vec2> ue_points;
    std::vector<std::uint32_t> typical_los;             // probe user's row
    std::vector<std::vector<std::uint32_t>> los_flags;  // one row per ue_point
    std::uint64_t rng_seed = 0;

    bool typical_is_los(std::uint32_t mm_index) const;
    bool ue_is_los(std::size_t ue, std::uint32_t mm_index) const;
};

struct ServingChoice {
    std::uint32_t bs_index = 0;  // index into the physical tier's point list
    TierId tier = TierId::Macro6G;
    double distance = 0.0;  // m

    bool same_station(const ServingChoice& o) const {
        return physical_tier(tier) == physical_tier(o.tier) && bs_index == o.bs_index;
    }
};

struct DropResult {
    ServingChoice dl;
    ServingChoice ul;
    double sinr_dl = std::numeric_limits<double>::quiet_NaN();
    double sinr_ul = std::numeric_limits<double>::quiet_NaN();
    bool decoupled = false;
};

// max(4 km, 12 / sqrt(min present physical density)): large enough that the
// edge bias at the center stays below the Monte Carlo confidence width.
double default_window_side(const NetworkConfig& cfg);

// Deterministic given the seed. Draws, in a fixed order, the Poisson station
// counts and positions per physical tier, the probe user's sparse LoS row,
// the other users, and then their LoS rows in user index order (mmWave
// indices ascending within a row). Campaigns replay the same stream prefix
// when a metric never touches the user process, so station positions and the
// probe row never depend on whether users were materialized.
Deployment sample_deployment(const NetworkConfig& cfg, double window_side,
                             std::uint64_t seed);

// Biased strongest-average-power association for the probe user over every
// station in the window; mmWave stations are classified LoS/NLoS by the
// probe's flags. Ties break toward the lower tier id, then the shorter
// distance, then the lower station index. Throws std::domain_error when the
// window holds no stations.
ServingChoice associate(const Deployment& dep, const NetworkConfig& cfg, Link link);

struct MeasureOptions {
    bool unit_fading = false;  // fix fading draws at their mean (testing)
};

// Fresh fading and beam draws on top of the deployment: the requested link's
// SINR is measured (the other stays NaN), both serving choices are recorded.
// Uplink interference places one active user per co-band station by
// rejection sampling against the uplink association rule; stations still
// unfilled after the 1e4-candidate pool are treated as inactive.
DropResult measure_sinr(const Deployment& dep, const NetworkConfig& cfg, Link link,
                        const MeasureOptions& opts = {});

struct CampaignRequest {
    bool sinr_dl = false;
    bool sinr_ul = false;
    bool rate_dl = false;
    bool rate_ul = false;
    bool spectral_efficiency = false;   // mean log2(1+SINR) per link
    std::vector<double> sinr_grid_db;   // empty -> default_sinr_grid_db()
    std::vector<double> rate_grid;      // empty -> default_rate_grid()
    double window_side = 0.0;           // 0 -> default_window_side(cfg)
};

// Empirical shares, mean spectral efficiencies, and coverage curves with
// 99% normal-approximation confidence half-widths. Half-widths are NaN (and
// curve half-width vectors empty) when fewer than two drops contribute.
struct CampaignResult {
    std::size_t drops_requested = 0;
    std::size_t drops_used = 0;  // drops whose window held at least one station
    std::array<std::uint64_t, kTierCount> dl_count{};
    std::array<std::uint64_t, kTierCount> ul_count{};
    std::array<double, kTierCount> dl_share{};
    std::array<double, kTierCount> ul_share{};
    std::array<double, kTierCount> dl_share_ci{};
    std::array<double, kTierCount> ul_share_ci{};
    double decoupled = std::numeric_limits<double>::quiet_NaN();
    double decoupled_ci = std::numeric_limits<double>::quiet_NaN();
    double se_dl = std::numeric_limits<double>::quiet_NaN();
    double se_dl_ci = std::numeric_limits<double>::quiet_NaN();
    double se_ul = std::numeric_limits<double>::quiet_NaN();
    double se_ul_ci = std::numeric_limits<double>::quiet_NaN();
    std::vector<CoverageCurve> curves;
};

// Drops are independent with per-drop streams derived purely from
// (seed, drop index); the reduction runs in drop order, so results are
// bit-identical across thread counts and between the two variants.
CampaignResult run_campaign(const NetworkConfig& cfg, std::size_t n_drops,
                            std::uint64_t seed, const CampaignRequest& req = {});
CampaignResult run_campaign_serial(const NetworkConfig& cfg, std::size_t n_drops,
                                   std::uint64_t seed, const CampaignRequest& req = {});

namespace detail {

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t drop_seed(std::uint64_t master, std::uint64_t index);
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t purpose);

// Uniform-grid acceleration for candidate association inside the uplink
// rejection pool. Exact: nearest-station ring searches expand until no
// closer cell can win.
class UplinkSampler {
  public:
    UplinkSampler(const Deployment& dep, const NetworkConfig& cfg);

    // mmWave stations within the blockage ball of `pos`, ascending index.
    std::vector<std::uint32_t> in_ball(const Vec2& pos) const;

    // Uplink association winner for a candidate at `pos` whose LoS set over
    // `in_ball(pos)` is `los` (aligned with the in-ball list).
    ServingChoice winner(const Vec2& pos, const std::vector<std::uint32_t>& ball,
                         const std::vector<unsigned char>& los) const;

  private:
    struct Grid {
        double origin = 0.0;
        double cell = 1.0;
        int n = 1;
        std::vector<std::vector<std::uint32_t>> bins;
        const std::vector<Vec2>* points = nullptr;
    };
    Grid grids_[kPhysicalTiers];
    const Deployment* dep_;
    const NetworkConfig* cfg_;
    double weight_[kTierCount];
    double exponent_[kTierCount];

    template <typename Pred>
    bool nearest(int tier, const Vec2& pos, Pred&& keep, std::uint32_t& idx,
                 double& dist) const;
};

}  // namespace detail

}  // namespace hetnet
