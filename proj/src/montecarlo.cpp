#include "hetnet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <stdexcept>

namespace hetnet {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile
constexpr int kPoolCap = 10000;              // uplink rejection candidates per drop

double point_norm(const Vec2& p) { return std::hypot(p.x, p.y); }
double point_dist(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

TierId sub6_tier(int physical) {
    return physical == 0 ? TierId::Macro6G : TierId::Small6G;
}

// Biased average received power on one link: weight * r^-exponent.
struct MetricTable {
    double weight[kTierCount];
    double exponent[kTierCount];

    MetricTable(const NetworkConfig& cfg, Link link) {
        for (TierId k : kAllTiers) {
            const TierParams& tp = cfg.tier(k);
            const double bias = link == Link::UL ? tp.ul_bias : tp.dl_bias;
            weight[static_cast<int>(k)] = bias * effective_signal_constant(cfg, k, link);
            exponent[static_cast<int>(k)] =
                link == Link::UL ? (1.0 - tp.pc_fraction) * tp.alpha : tp.alpha;
        }
    }
    double eval(TierId k, double r) const {
        const int i = static_cast<int>(k);
        return weight[i] * std::pow(r, -exponent[i]);
    }
};

// Argmax with the deterministic tie order: metric, then tier id, then
// distance, then station index.
struct BestChoice {
    double metric = 0.0;
    ServingChoice choice;
    bool any = false;

    void offer(double m, TierId t, std::uint32_t i, double r) {
        if (any) {
            if (m < metric) return;
            if (m == metric) {
                if (t > choice.tier) return;
                if (t == choice.tier) {
                    if (r > choice.distance) return;
                    if (r == choice.distance && i >= choice.bs_index) return;
                }
            }
        }
        any = true;
        metric = m;
        choice = ServingChoice{i, t, r};
    }
};

// Bins the mmWave stations so a blockage-ball query only touches the
// neighborhood of cells around the probe position.
class BallIndex {
  public:
    BallIndex(const std::vector<Vec2>& pts, double window_side, double radius)
        : pts_(&pts), radius_(radius), half_(window_side / 2.0) {
        n_ = std::clamp(static_cast<int>(window_side / std::max(radius, 1e-9)), 1, 512);
        cell_ = window_side / n_;
        reach_ = static_cast<int>(std::ceil(radius / cell_));
        bins_.assign(static_cast<std::size_t>(n_) * n_, {});
        for (std::uint32_t i = 0; i < pts.size(); ++i)
            bins_[bin_of(pts[i])].push_back(i);
    }

    void collect(const Vec2& pos, std::vector<std::uint32_t>& out) const {
        out.clear();
        const int cx = coord(pos.x), cy = coord(pos.y);
        for (int gy = std::max(cy - reach_, 0); gy <= std::min(cy + reach_, n_ - 1); ++gy)
            for (int gx = std::max(cx - reach_, 0); gx <= std::min(cx + reach_, n_ - 1); ++gx)
                for (std::uint32_t i : bins_[static_cast<std::size_t>(gy) * n_ + gx])
                    if (point_dist(pos, (*pts_)[i]) < radius_) out.push_back(i);
        std::sort(out.begin(), out.end());
    }

  private:
    int coord(double v) const {
        return std::clamp(static_cast<int>((v + half_) / cell_), 0, n_ - 1);
    }
    std::size_t bin_of(const Vec2& p) const {
        return static_cast<std::size_t>(coord(p.y)) * n_ + coord(p.x);
    }

    const std::vector<Vec2>* pts_;
    double radius_, half_, cell_;
    int n_ = 1, reach_ = 0;
    std::vector<std::vector<std::uint32_t>> bins_;
};

}  // namespace

int physical_tier(TierId k) { return is_mmwave(k) ? 2 : static_cast<int>(k); }

bool Deployment::typical_is_los(std::uint32_t mm_index) const {
    return std::binary_search(typical_los.begin(), typical_los.end(), mm_index);
}

bool Deployment::ue_is_los(std::size_t ue, std::uint32_t mm_index) const {
    const auto& row = los_flags.at(ue);
    return std::binary_search(row.begin(), row.end(), mm_index);
}

double default_window_side(const NetworkConfig& cfg) {
    double min_density = std::numeric_limits<double>::infinity();
    const double physical[kPhysicalTiers] = {cfg.tier(TierId::Macro6G).density,
                                             cfg.tier(TierId::Small6G).density,
                                             cfg.tier(TierId::MmLoS).density};
    for (double d : physical)
        if (d > 0.0) min_density = std::min(min_density, d);
    if (!std::isfinite(min_density)) return 4000.0;
    return std::max(4000.0, 12.0 / std::sqrt(min_density));
}

namespace detail {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t drop_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t state = master ^ (0xA0761D6478BD642Full * (index + 1));
    splitmix64(state);
    return splitmix64(state);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t purpose) {
    std::uint64_t state = seed ^ (0xE7037ED1A0B428DBull * (purpose + 1));
    splitmix64(state);
    return std::mt19937_64(splitmix64(state));
}

UplinkSampler::UplinkSampler(const Deployment& dep, const NetworkConfig& cfg)
    : dep_(&dep), cfg_(&cfg) {
    const MetricTable mt(cfg, Link::UL);
    std::copy(std::begin(mt.weight), std::end(mt.weight), weight_);
    std::copy(std::begin(mt.exponent), std::end(mt.exponent), exponent_);
    for (int t = 0; t < kPhysicalTiers; ++t) {
        Grid& g = grids_[t];
        g.points = &dep.bs_points[t];
        const std::size_t count = g.points->size();
        g.n = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(count))), 1, 512);
        g.origin = -dep.window_side / 2.0;
        g.cell = dep.window_side / g.n;
        g.bins.assign(static_cast<std::size_t>(g.n) * g.n, {});
        for (std::uint32_t i = 0; i < count; ++i) {
            const Vec2& p = (*g.points)[i];
            const int cx = std::clamp(static_cast<int>((p.x - g.origin) / g.cell), 0, g.n - 1);
            const int cy = std::clamp(static_cast<int>((p.y - g.origin) / g.cell), 0, g.n - 1);
            g.bins[static_cast<std::size_t>(cy) * g.n + cx].push_back(i);
        }
    }
}

std::vector<std::uint32_t> UplinkSampler::in_ball(const Vec2& pos) const {
    std::vector<std::uint32_t> out;
    const double rb = cfg_->blockage.los_radius;
    const auto& mm = dep_->bs_points[2];
    if (rb <= 0.0 || mm.empty()) return out;
    const Grid& g = grids_[2];
    const int reach = static_cast<int>(std::ceil(rb / g.cell));
    const int cx = std::clamp(static_cast<int>((pos.x - g.origin) / g.cell), 0, g.n - 1);
    const int cy = std::clamp(static_cast<int>((pos.y - g.origin) / g.cell), 0, g.n - 1);
    for (int gy = std::max(cy - reach, 0); gy <= std::min(cy + reach, g.n - 1); ++gy)
        for (int gx = std::max(cx - reach, 0); gx <= std::min(cx + reach, g.n - 1); ++gx)
            for (std::uint32_t i : g.bins[static_cast<std::size_t>(gy) * g.n + gx])
                if (point_dist(pos, mm[i]) < rb) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

template <typename Pred>
bool UplinkSampler::nearest(int tier, const Vec2& pos, Pred&& keep, std::uint32_t& idx,
                            double& dist) const {
    const Grid& g = grids_[tier];
    if (!g.points || g.points->empty()) return false;
    const int cx = std::clamp(static_cast<int>((pos.x - g.origin) / g.cell), 0, g.n - 1);
    const int cy = std::clamp(static_cast<int>((pos.y - g.origin) / g.cell), 0, g.n - 1);
    bool found = false;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_idx = 0;
    auto visit = [&](int gx, int gy) {
        if (gx < 0 || gy < 0 || gx >= g.n || gy >= g.n) return;
        for (std::uint32_t i : g.bins[static_cast<std::size_t>(gy) * g.n + gx]) {
            if (!keep(i)) continue;
            const double r = point_dist(pos, (*g.points)[i]);
            if (r < best || (r == best && found && i < best_idx)) {
                best = r;
                best_idx = i;
                found = true;
            }
        }
    };
    for (int ring = 0; ring <= 2 * g.n; ++ring) {
        // Any cell on this ring is at least (ring-1) cells away.
        if (found && (ring - 1) * g.cell > best) break;
        if (ring == 0) {
            visit(cx, cy);
            continue;
        }
        for (int gx = cx - ring; gx <= cx + ring; ++gx) {
            visit(gx, cy - ring);
            visit(gx, cy + ring);
        }
        for (int gy = cy - ring + 1; gy <= cy + ring - 1; ++gy) {
            visit(cx - ring, gy);
            visit(cx + ring, gy);
        }
    }
    if (found) {
        idx = best_idx;
        dist = best;
    }
    return found;
}

ServingChoice UplinkSampler::winner(const Vec2& pos, const std::vector<std::uint32_t>& ball,
                                    const std::vector<unsigned char>& los) const {
    BestChoice best;
    std::uint32_t idx = 0;
    double r = 0.0;
    auto all = [](std::uint32_t) { return true; };
    for (int t = 0; t < 2; ++t)
        if (nearest(t, pos, all, idx, r)) {
            const TierId k = sub6_tier(t);
            best.offer(weight_[static_cast<int>(k)] *
                           std::pow(r, -exponent_[static_cast<int>(k)]),
                       k, idx, r);
        }
    std::vector<std::uint32_t> flagged;
    for (std::size_t j = 0; j < ball.size(); ++j)
        if (los[j]) {
            flagged.push_back(ball[j]);
            const double d = point_dist(pos, dep_->bs_points[2][ball[j]]);
            best.offer(weight_[static_cast<int>(TierId::MmLoS)] *
                           std::pow(d, -exponent_[static_cast<int>(TierId::MmLoS)]),
                       TierId::MmLoS, ball[j], d);
        }
    auto not_los = [&](std::uint32_t i) {
        return !std::binary_search(flagged.begin(), flagged.end(), i);
    };
    if (nearest(2, pos, not_los, idx, r))
        best.offer(weight_[static_cast<int>(TierId::MmNLoS)] *
                       std::pow(r, -exponent_[static_cast<int>(TierId::MmNLoS)]),
                   TierId::MmNLoS, idx, r);
    if (!best.any) throw std::domain_error("uplink sampler: deployment holds no stations");
    return best.choice;
}

}  // namespace detail

namespace {

// Shared by the public sampler and the campaign path; with_users=false stops
// after the probe row, having consumed the identical stream prefix.
Deployment sample_impl(const NetworkConfig& cfg, double window_side, std::uint64_t seed,
                       bool with_users) {
    if (!(window_side > 0.0))
        throw std::domain_error("sample_deployment: window side must be positive");
    Deployment dep;
    dep.window_side = window_side;
    dep.rng_seed = seed;
    auto rng = detail::substream(seed, 0);
    const double area = window_side * window_side;
    const double half = window_side / 2.0;
    std::uniform_real_distribution<double> coord(-half, half);
    auto scatter = [&](double density, std::vector<Vec2>& out) {
        if (!(density > 0.0)) return;
        std::poisson_distribution<long> count(density * area);
        out.resize(static_cast<std::size_t>(count(rng)));
        for (Vec2& p : out) {
            p.x = coord(rng);
            p.y = coord(rng);
        }
    };
    scatter(cfg.tier(TierId::Macro6G).density, dep.bs_points[0]);
    scatter(cfg.tier(TierId::Small6G).density, dep.bs_points[1]);
    scatter(cfg.tier(TierId::MmLoS).density, dep.bs_points[2]);

    const double rb = cfg.blockage.los_radius;
    const double pl = cfg.blockage.los_fraction;
    const bool blockage = !dep.bs_points[2].empty() && rb > 0.0 && pl > 0.0;
    std::optional<BallIndex> index;
    std::bernoulli_distribution los(std::max(pl, 0.0));
    std::vector<std::uint32_t> ball;
    auto draw_row = [&](const Vec2& user, std::vector<std::uint32_t>& row) {
        index->collect(user, ball);
        for (std::uint32_t i : ball)
            if (los(rng)) row.push_back(i);
    };
    if (blockage) {
        index.emplace(dep.bs_points[2], window_side, rb);
        draw_row(Vec2{0.0, 0.0}, dep.typical_los);
    }
    if (!with_users) return dep;

    scatter(cfg.ue_density, dep.ue_points);
    dep.los_flags.resize(dep.ue_points.size());
    if (blockage)
        for (std::size_t u = 0; u < dep.ue_points.size(); ++u)
            draw_row(dep.ue_points[u], dep.los_flags[u]);
    return dep;
}

}  // namespace

Deployment sample_deployment(const NetworkConfig& cfg, double window_side,
                             std::uint64_t seed) {
    return sample_impl(cfg, window_side, seed, true);
}

ServingChoice associate(const Deployment& dep, const NetworkConfig& cfg, Link link) {
    const MetricTable mt(cfg, link);
    BestChoice best;
    for (int t = 0; t < 2; ++t) {
        const TierId k = sub6_tier(t);
        const auto& pts = dep.bs_points[t];
        for (std::uint32_t i = 0; i < pts.size(); ++i) {
            const double r = point_norm(pts[i]);
            best.offer(mt.eval(k, r), k, i, r);
        }
    }
    const auto& mm = dep.bs_points[2];
    for (std::uint32_t i = 0; i < mm.size(); ++i) {
        const double r = point_norm(mm[i]);
        const TierId k = dep.typical_is_los(i) ? TierId::MmLoS : TierId::MmNLoS;
        best.offer(mt.eval(k, r), k, i, r);
    }
    if (!best.any) throw std::domain_error("associate: deployment holds no stations");
    return best.choice;
}

namespace {

// One active user per co-band station, rejection-sampled against the uplink
// association rule from a shared candidate pool; stations left unfilled when
// the pool is exhausted stay silent.
double uplink_interference(const Deployment& dep, const NetworkConfig& cfg,
                           const ServingChoice& serving, std::mt19937_64& rng,
                           const MeasureOptions& opts) {
    struct Active {
        Vec2 pos;
        TierId tier = TierId::Macro6G;
        double own_dist = 0.0;
        bool filled = false;
    };
    const bool mm_band = is_mmwave(serving.tier);
    const int band_lo = mm_band ? 2 : 0;
    const int band_hi = mm_band ? 2 : 1;
    const int serving_physical = physical_tier(serving.tier);

    std::array<std::vector<Active>, kPhysicalTiers> slots;
    std::size_t remaining = 0;
    for (int t = band_lo; t <= band_hi; ++t) {
        slots[t].resize(dep.bs_points[t].size());
        remaining += dep.bs_points[t].size();
    }
    if (remaining > 0) --remaining;  // the probe user occupies the serving station

    if (remaining > 0) {
        const detail::UplinkSampler sampler(dep, cfg);
        const double half = dep.window_side / 2.0;
        std::uniform_real_distribution<double> coord(-half, half);
        const double pl = cfg.blockage.los_fraction;
        std::bernoulli_distribution los_draw(std::max(pl, 0.0));
        std::vector<unsigned char> los;
        for (int attempt = 0; attempt < kPoolCap && remaining > 0; ++attempt) {
            Vec2 pos;
            pos.x = coord(rng);
            pos.y = coord(rng);
            const std::vector<std::uint32_t> ball = sampler.in_ball(pos);
            los.assign(ball.size(), 0);
            if (pl > 0.0)
                for (std::size_t j = 0; j < ball.size(); ++j)
                    los[j] = los_draw(rng) ? 1 : 0;
            const ServingChoice won = sampler.winner(pos, ball, los);
            const int pt = physical_tier(won.tier);
            if (pt < band_lo || pt > band_hi) continue;
            if (pt == serving_physical && won.bs_index == serving.bs_index) continue;
            Active& slot = slots[pt][won.bs_index];
            if (slot.filled) continue;
            slot.pos = pos;
            slot.tier = won.tier;
            slot.own_dist = won.distance;
            slot.filled = true;
            --remaining;
        }
    }

    const Vec2 bs_pos = dep.bs_points[serving_physical][serving.bs_index];
    std::exponential_distribution<double> fading(1.0);
    std::bernoulli_distribution main_lobe(cfg.antenna.main_prob());
    const double side_ratio = cfg.antenna.side_gain / cfg.antenna.main_gain;
    double total = 0.0;
    for (int t = band_lo; t <= band_hi; ++t)
        for (const Active& a : slots[t]) {
            if (!a.filled) continue;
            const TierParams& tp = cfg.tier(a.tier);
            double g = 1.0;
            if (mm_band) g = main_lobe(rng) ? 1.0 : side_ratio;
            const double h = opts.unit_fading ? 1.0 : fading(rng);
            const double zeta = std::pow(a.own_dist, tp.pc_fraction * tp.alpha);
            const double r = point_dist(a.pos, bs_pos);
            total += effective_signal_constant(cfg, a.tier, Link::UL) * zeta * g * h *
                     std::pow(r, -tp.alpha);
        }
    return total;
}

}  // namespace

DropResult measure_sinr(const Deployment& dep, const NetworkConfig& cfg, Link link,
                        const MeasureOptions& opts) {
    DropResult res;
    res.dl = associate(dep, cfg, Link::DL);
    res.ul = associate(dep, cfg, Link::UL);
    res.decoupled = !res.dl.same_station(res.ul);

    const ServingChoice serving = link == Link::DL ? res.dl : res.ul;
    const TierParams& sp = cfg.tier(serving.tier);
    auto rng = detail::substream(dep.rng_seed, link == Link::DL ? 1 : 2);
    std::exponential_distribution<double> fading(1.0);
    auto fade = [&] { return opts.unit_fading ? 1.0 : fading(rng); };

    const double sig_exp =
        link == Link::UL ? (1.0 - sp.pc_fraction) * sp.alpha : sp.alpha;
    const double h0 = fade();
    const double signal = effective_signal_constant(cfg, serving.tier, link) * h0 *
                          std::pow(serving.distance, -sig_exp);

    double interference = 0.0;
    if (link == Link::DL) {
        if (!is_mmwave(serving.tier)) {
            for (int t = 0; t < 2; ++t) {
                const TierId k = sub6_tier(t);
                const double eff = effective_signal_constant(cfg, k, Link::DL);
                const double alpha = cfg.tier(k).alpha;
                const auto& pts = dep.bs_points[t];
                for (std::uint32_t i = 0; i < pts.size(); ++i) {
                    if (t == physical_tier(serving.tier) && i == serving.bs_index) continue;
                    const double h = fade();
                    interference += eff * h * std::pow(point_norm(pts[i]), -alpha);
                }
            }
        } else {
            std::bernoulli_distribution main_lobe(cfg.antenna.main_prob());
            const double side_ratio = cfg.antenna.side_gain / cfg.antenna.main_gain;
            const auto& pts = dep.bs_points[2];
            for (std::uint32_t i = 0; i < pts.size(); ++i) {
                if (i == serving.bs_index) continue;
                const TierId k = dep.typical_is_los(i) ? TierId::MmLoS : TierId::MmNLoS;
                const double g = main_lobe(rng) ? 1.0 : side_ratio;
                const double h = fade();
                interference += effective_signal_constant(cfg, k, Link::DL) * g * h *
                                std::pow(point_norm(pts[i]), -cfg.tier(k).alpha);
            }
        }
    } else {
        interference = uplink_interference(dep, cfg, serving, rng, opts);
    }

    const double sinr = signal / (sp.noise_power + interference);
    (link == Link::DL ? res.sinr_dl : res.sinr_ul) = sinr;
    return res;
}

namespace {

struct DropSummary {
    signed char dl_tier = -1;
    signed char ul_tier = -1;
    unsigned char valid = 0;
    unsigned char decoupled = 0;
    double sinr_dl = std::numeric_limits<double>::quiet_NaN();
    double sinr_ul = std::numeric_limits<double>::quiet_NaN();
};

DropSummary run_one(const NetworkConfig& cfg, double window, std::uint64_t master,
                    std::size_t index, bool need_dl, bool need_ul) {
    DropSummary out;
    // Campaign metrics never read the user process, so only the stream prefix
    // (stations + probe row) is materialized; results match the full sampler.
    const Deployment dep = sample_impl(cfg, window, detail::drop_seed(master, index), false);
    bool any = false;
    for (const auto& pts : dep.bs_points) any = any || !pts.empty();
    if (!any) return out;
    out.valid = 1;
    ServingChoice dl, ul;
    if (need_dl) {
        const DropResult res = measure_sinr(dep, cfg, Link::DL);
        out.sinr_dl = res.sinr_dl;
        dl = res.dl;
        ul = res.ul;
    }
    if (need_ul) {
        const DropResult res = measure_sinr(dep, cfg, Link::UL);
        out.sinr_ul = res.sinr_ul;
        dl = res.dl;
        ul = res.ul;
    }
    if (!need_dl && !need_ul) {
        dl = associate(dep, cfg, Link::DL);
        ul = associate(dep, cfg, Link::UL);
    }
    out.dl_tier = static_cast<signed char>(dl.tier);
    out.ul_tier = static_cast<signed char>(ul.tier);
    out.decoupled = dl.same_station(ul) ? 0 : 1;
    return out;
}

// Mean and 99% half-width from running sums; NaN half-width below two samples.
struct Welford {
    std::size_t n = 0;
    double sum = 0.0, sum_sq = 0.0;

    void add(double x) {
        ++n;
        sum += x;
        sum_sq += x * x;
    }
    double mean() const {
        return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    }
    double half_width() const {
        if (n < 2) return std::numeric_limits<double>::quiet_NaN();
        const double m = mean();
        double var = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        var = std::max(var, 0.0);
        return kZ99 * std::sqrt(var / static_cast<double>(n));
    }
};

CampaignResult reduce_campaign(const NetworkConfig& cfg, std::size_t n_drops,
                               const CampaignRequest& req, bool need_dl, bool need_ul,
                               const std::vector<DropSummary>& drops) {
    CampaignResult out;
    out.drops_requested = n_drops;
    for (const DropSummary& d : drops) {
        if (!d.valid) continue;
        ++out.drops_used;
        ++out.dl_count[d.dl_tier];
        ++out.ul_count[d.ul_tier];
    }
    const std::size_t used = out.drops_used;
    auto share_of = [&](std::uint64_t count, double& share, double& ci) {
        if (used == 0) {
            share = std::numeric_limits<double>::quiet_NaN();
            ci = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        share = static_cast<double>(count) / static_cast<double>(used);
        if (used < 2) {
            ci = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        const double var = share * (1.0 - share) * static_cast<double>(used) /
                           static_cast<double>(used - 1);
        ci = kZ99 * std::sqrt(var / static_cast<double>(used));
    };
    for (int k = 0; k < kTierCount; ++k) {
        share_of(out.dl_count[k], out.dl_share[k], out.dl_share_ci[k]);
        share_of(out.ul_count[k], out.ul_share[k], out.ul_share_ci[k]);
    }
    std::uint64_t dec = 0;
    for (const DropSummary& d : drops) dec += d.valid && d.decoupled ? 1 : 0;
    share_of(dec, out.decoupled, out.decoupled_ci);

    const std::string digest = config_digest(cfg);
    auto indicator_curve = [&](const char* metric, Link link, std::vector<double> axis,
                               auto&& value_of) {
        CoverageCurve curve;
        curve.metric = metric;
        curve.link = link;
        curve.x_axis = std::move(axis);
        curve.config_digest = digest;
        curve.analytical.clear();
        for (double threshold : curve.x_axis) {
            Welford acc;
            for (const DropSummary& d : drops) {
                if (!d.valid) continue;
                const double v = value_of(d);
                if (std::isnan(v)) continue;
                acc.add(v > threshold ? 1.0 : 0.0);
            }
            curve.empirical_mean.push_back(acc.mean());
            if (acc.n >= 2) curve.empirical_ci99.push_back(acc.half_width());
        }
        if (curve.empirical_ci99.size() != curve.x_axis.size()) curve.empirical_ci99.clear();
        out.curves.push_back(std::move(curve));
    };

    const std::vector<double> sinr_grid =
        req.sinr_grid_db.empty() ? default_sinr_grid_db() : req.sinr_grid_db;
    const std::vector<double> rate_grid =
        req.rate_grid.empty() ? default_rate_grid() : req.rate_grid;

    double load[2][kTierCount];
    double width[kTierCount];
    for (int k = 0; k < kTierCount; ++k) {
        const TierId id = static_cast<TierId>(k);
        load[0][k] = mean_load(cfg, Link::DL, id);
        load[1][k] = mean_load(cfg, Link::UL, id);
        width[k] = cfg.tier(id).bandwidth;
    }
    auto rate_of = [&](Link link, const DropSummary& d) {
        const double sinr = link == Link::DL ? d.sinr_dl : d.sinr_ul;
        const int tier = link == Link::DL ? d.dl_tier : d.ul_tier;
        if (std::isnan(sinr)) return std::numeric_limits<double>::quiet_NaN();
        return width[tier] * std::log2(1.0 + sinr) /
               load[static_cast<int>(link)][tier];
    };

    if (req.sinr_dl) {
        std::vector<double> axis = sinr_grid;
        indicator_curve("sinr_coverage", Link::DL, std::move(axis), [&](const DropSummary& d) {
            return std::isnan(d.sinr_dl) ? d.sinr_dl : 10.0 * std::log10(d.sinr_dl);
        });
    }
    if (req.sinr_ul) {
        std::vector<double> axis = sinr_grid;
        indicator_curve("sinr_coverage", Link::UL, std::move(axis), [&](const DropSummary& d) {
            return std::isnan(d.sinr_ul) ? d.sinr_ul : 10.0 * std::log10(d.sinr_ul);
        });
    }
    if (req.rate_dl) {
        std::vector<double> axis = rate_grid;
        indicator_curve("rate_coverage", Link::DL, std::move(axis),
                        [&](const DropSummary& d) { return rate_of(Link::DL, d); });
    }
    if (req.rate_ul) {
        std::vector<double> axis = rate_grid;
        indicator_curve("rate_coverage", Link::UL, std::move(axis),
                        [&](const DropSummary& d) { return rate_of(Link::UL, d); });
    }
    if (req.spectral_efficiency) {
        Welford se_dl, se_ul;
        for (const DropSummary& d : drops) {
            if (!d.valid) continue;
            if (need_dl && !std::isnan(d.sinr_dl)) se_dl.add(std::log2(1.0 + d.sinr_dl));
            if (need_ul && !std::isnan(d.sinr_ul)) se_ul.add(std::log2(1.0 + d.sinr_ul));
        }
        out.se_dl = se_dl.mean();
        out.se_dl_ci = se_dl.half_width();
        out.se_ul = se_ul.mean();
        out.se_ul_ci = se_ul.half_width();
    }
    return out;
}

CampaignResult run_campaign_impl(const NetworkConfig& cfg, std::size_t n_drops,
                                 std::uint64_t seed, const CampaignRequest& req,
                                 bool parallel) {
    const double window =
        req.window_side > 0.0 ? req.window_side : default_window_side(cfg);
    const bool need_dl = req.sinr_dl || req.rate_dl || req.spectral_efficiency;
    const bool need_ul = req.sinr_ul || req.rate_ul || req.spectral_efficiency;
    std::vector<DropSummary> drops(n_drops);
    if (parallel) {
        std::exception_ptr error;
        const std::int64_t total = static_cast<std::int64_t>(n_drops);
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < total; ++i) {
            try {
                drops[i] = run_one(cfg, window, seed, static_cast<std::size_t>(i), need_dl,
                                   need_ul);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
    } else {
        for (std::size_t i = 0; i < n_drops; ++i)
            drops[i] = run_one(cfg, window, seed, i, need_dl, need_ul);
    }
    return reduce_campaign(cfg, n_drops, req, need_dl, need_ul, drops);
}

}  // namespace

CampaignResult run_campaign(const NetworkConfig& cfg, std::size_t n_drops,
                            std::uint64_t seed, const CampaignRequest& req) {
    return run_campaign_impl(cfg, n_drops, seed, req, true);
}

CampaignResult run_campaign_serial(const NetworkConfig& cfg, std::size_t n_drops,
                                   std::uint64_t seed, const CampaignRequest& req) {
    return run_campaign_impl(cfg, n_drops, seed, req, false);
}

}  // namespace hetnet
