#include "hetnet/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>

namespace hetnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Mode { Sinr, CoupledUl, SnrSparse, SirDense };

struct TierSlot {
    TierId k = TierId::Macro6G;
    double assoc = 0.0;
    double strength = 0.0;  // effective signal constant of the transmission
    double sig_exp = 0.0;   // distance exponent of the received signal
    double noise = 0.0;
    double load = 1.0;
    double upper = kInf;
    std::vector<double> knots;
    std::optional<LaplaceEvaluator> lap;
    numerics::QuadratureSpec outer;
};

struct CoverageSetup {
    const NetworkConfig* cfg = nullptr;
    Link link = Link::DL;        // transmission link
    Link assoc_link = Link::DL;  // association defining weights and laws
    bool with_noise = true;
    std::vector<TierSlot> slots;
};

// Active-station densities per interfering process: a station transmits only
// when at least one user selects it, capping each population at the share of
// the user field it attracts. The two mmWave path classes describe one
// physical deployment, so they thin together on their combined share.
std::array<double, kTierCount> thinned_densities(const NetworkConfig& cfg, Link link) {
    std::array<double, kTierCount> assoc{};
    for (TierId k : kAllTiers)
        assoc[static_cast<int>(k)] = association_probability(cfg, link, k);
    double mm_share = assoc[static_cast<int>(TierId::MmLoS)] +
                      assoc[static_cast<int>(TierId::MmNLoS)];
    std::array<double, kTierCount> out{};
    for (TierId k : kAllTiers) {
        double share = is_mmwave(k) ? mm_share : assoc[static_cast<int>(k)];
        out[static_cast<int>(k)] =
            std::min(cfg.tier(k).density, cfg.ue_density * share);
    }
    return out;
}

CoverageSetup make_setup(const NetworkConfig& cfg, Link link, Mode mode) {
    CoverageSetup st;
    st.cfg = &cfg;
    st.link = link;
    st.assoc_link = (mode == Mode::CoupledUl) ? Link::DL : link;
    st.with_noise = mode != Mode::SirDense;
    std::optional<std::array<double, kTierCount>> density;
    if (mode == Mode::SirDense) density = thinned_densities(cfg, link);
    for (TierId k : kAllTiers) {
        double a = association_probability(cfg, st.assoc_link, k);
        if (a <= 0.0) continue;
        TierSlot slot;
        slot.k = k;
        slot.assoc = a;
        slot.strength = effective_signal_constant(cfg, k, link);
        const TierParams& tp = cfg.tier(k);
        slot.sig_exp =
            (link == Link::UL) ? (1.0 - tp.pc_fraction) * tp.alpha : tp.alpha;
        slot.noise = tp.noise_power;
        if (cfg.ue_density > 0.0)
            slot.load = 1.0 + 1.28 * a * cfg.ue_density / tp.density;
        slot.upper = (k == TierId::MmLoS) ? cfg.blockage.los_radius : kInf;
        slot.knots = detail::association_breakpoints(cfg, st.assoc_link, k);
        if (mode != Mode::SnrSparse)
            slot.lap.emplace(cfg, link, k, mode == Mode::CoupledUl, density);
        slot.outer = cfg.quadrature;
        if (slot.lap && link == Link::UL && !is_mmwave(k)) {
            // The uplink sub-6GHz transform is itself a quadrature; keep the
            // outer tolerance above the inner one so its residual error is
            // not mistaken for structure.
            slot.outer.abs_tol = std::max(slot.outer.abs_tol, 1e-7);
            slot.outer.rel_tol = std::max(slot.outer.rel_tol, 1e-6);
        }
        st.slots.push_back(std::move(slot));
    }
    return st;
}

double conditional_value(const CoverageSetup& st, const TierSlot& slot, double tau) {
    if (tau <= 0.0) return 1.0;
    if (!(tau < 1e300)) return 0.0;
    auto integrand = [&](double x) {
        double w = conditional_distance_density_unnormalized(*st.cfg, st.assoc_link,
                                                             slot.k, x);
        if (w <= 0.0) return 0.0;
        double sig = slot.strength * std::pow(x, -slot.sig_exp);
        double v = w;
        if (st.with_noise) {
            double e = tau * slot.noise / sig;
            if (e > 700.0) return 0.0;
            v *= std::exp(-e);
        }
        if (slot.lap) v *= (*slot.lap)(tau / sig, x);
        return v;
    };
    double raw = numerics::integrate(integrand, 0.0, slot.upper, slot.outer, slot.knots);
    return std::clamp(raw / slot.assoc, 0.0, 1.0);
}

double total_value(const CoverageSetup& st, double tau) {
    double total = 0.0;
    for (const TierSlot& slot : st.slots)
        total += slot.assoc * conditional_value(st, slot, tau);
    return std::min(total, 1.0);
}

const TierSlot& find_slot(const CoverageSetup& st, TierId k) {
    for (const TierSlot& slot : st.slots)
        if (slot.k == k) return slot;
    throw std::domain_error(std::string("coverage: tier ") + tier_name(k) +
                            " is never selected on this link");
}

double load_factor(const NetworkConfig& cfg, Link link, TierId k) {
    double a = association_probability(cfg, link, k);
    if (a <= 0.0 || cfg.ue_density <= 0.0) return 1.0;
    return 1.0 + 1.28 * a * cfg.ue_density / cfg.tier(k).density;
}

// P(rate > rho) given the setup; tier thresholds fold the per-tier load and
// bandwidth into an SINR threshold.
double rate_value(const NetworkConfig& cfg, const CoverageSetup& st, double rho) {
    if (rho <= 0.0) return 1.0;  // any served user has positive rate
    double total = 0.0;
    for (const TierSlot& slot : st.slots) {
        double w = cfg.tier(slot.k).bandwidth;
        double tau = std::expm1(M_LN2 * rho * slot.load / w);
        if (!std::isfinite(tau)) continue;
        total += slot.assoc * conditional_value(st, slot, tau);
    }
    return std::min(total, 1.0);
}

CoverageCurve eval_curve(const NetworkConfig& cfg, Link link, Mode mode,
                         const char* metric, bool x_in_db, bool rate,
                         const std::vector<double>& xs, bool parallel) {
    CoverageCurve curve;
    curve.metric = metric;
    curve.link = link;
    curve.x_axis = xs;
    curve.analytical.assign(xs.size(), 0.0);
    curve.config_digest = config_digest(cfg);
    CoverageSetup st = make_setup(cfg, link, mode);
    std::exception_ptr error;
    auto body = [&](std::int64_t i) {
        double x = xs[static_cast<std::size_t>(i)];
        double v;
        if (rate)
            v = rate_value(cfg, st, x);
        else
            v = total_value(st, x_in_db ? std::pow(10.0, x / 10.0) : x);
        curve.analytical[static_cast<std::size_t>(i)] = v;
    };
    std::int64_t n = static_cast<std::int64_t>(xs.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) body(i);
    }
    if (error) std::rethrow_exception(error);
    return curve;
}

}  // namespace

double mean_load(const NetworkConfig& cfg, Link link, TierId k) {
    return load_factor(cfg, link, k);
}

double sinr_coverage_conditional(const NetworkConfig& cfg, Link link, TierId k,
                                 double tau) {
    CoverageSetup st = make_setup(cfg, link, Mode::Sinr);
    return conditional_value(st, find_slot(st, k), tau);
}

double sinr_coverage(const NetworkConfig& cfg, Link link, double tau) {
    CoverageSetup st = make_setup(cfg, link, Mode::Sinr);
    return total_value(st, tau);
}

double sinr_coverage_coupled_ul(const NetworkConfig& cfg, double tau) {
    CoverageSetup st = make_setup(cfg, Link::UL, Mode::CoupledUl);
    return total_value(st, tau);
}

double snr_coverage_sparse(const NetworkConfig& cfg, Link link, double tau) {
    CoverageSetup st = make_setup(cfg, link, Mode::SnrSparse);
    return total_value(st, tau);
}

double sir_coverage_dense(const NetworkConfig& cfg, Link link, double tau) {
    CoverageSetup st = make_setup(cfg, link, Mode::SirDense);
    return total_value(st, tau);
}

double rate_coverage(const NetworkConfig& cfg, Link link, double rho) {
    CoverageSetup st = make_setup(cfg, link, Mode::Sinr);
    return rate_value(cfg, st, rho);
}

double area_sum_rate(const NetworkConfig& cfg, Link link) {
    CoverageSetup st = make_setup(cfg, link, Mode::Sinr);
    double mm_share = 0.0;
    for (const TierSlot& slot : st.slots)
        if (is_mmwave(slot.k)) mm_share += slot.assoc;
    double total = 0.0;
    for (const TierSlot& slot : st.slots) {
        const TierParams& tp = cfg.tier(slot.k);
        if (tp.bandwidth <= 0.0) continue;
        // Spectral-efficiency coverage along rho in bit/s/Hz.
        auto se_cov = [&](double rho) {
            return conditional_value(st, slot, std::expm1(M_LN2 * rho));
        };
        // The deployment density splits between the two mmWave path classes
        // in proportion to their association shares.
        double weight = is_mmwave(slot.k)
                            ? (mm_share > 0.0 ? tp.density * slot.assoc / mm_share : 0.0)
                            : tp.density;
        if (weight <= 0.0) continue;
        // Truncate the tail once coverage is negligible next to its rho = 0
        // value of 1, doubling until the cutoff is bracketed.
        double hi = 4.0;
        while (hi < 512.0 && se_cov(hi) > 1e-6) hi *= 2.0;
        numerics::QuadratureSpec spec{1e-8, 1e-7, 200};
        double integral = numerics::integrate(se_cov, 0.0, hi, spec, {});
        total += weight * tp.bandwidth * integral;
    }
    return total;
}

std::vector<double> default_sinr_grid_db() {
    std::vector<double> grid(61);
    for (int i = 0; i < 61; ++i) grid[static_cast<std::size_t>(i)] = -10.0 + 0.5 * i;
    return grid;
}

std::vector<double> default_rate_grid() {
    std::vector<double> grid(41);
    for (int i = 0; i < 41; ++i)
        grid[static_cast<std::size_t>(i)] = std::pow(10.0, 5.0 + 0.125 * i);
    return grid;
}

CoverageCurve sinr_coverage_curve(const NetworkConfig& cfg, Link link,
                                  const std::vector<double>& taus_db) {
    return eval_curve(cfg, link, Mode::Sinr, "sinr_coverage", true, false, taus_db,
                      true);
}

CoverageCurve sinr_coverage_curve_serial(const NetworkConfig& cfg, Link link,
                                         const std::vector<double>& taus_db) {
    return eval_curve(cfg, link, Mode::Sinr, "sinr_coverage", true, false, taus_db,
                      false);
}

CoverageCurve coupled_ul_coverage_curve(const NetworkConfig& cfg,
                                        const std::vector<double>& taus_db) {
    return eval_curve(cfg, Link::UL, Mode::CoupledUl, "coupled_ul_coverage", true,
                      false, taus_db, true);
}

CoverageCurve rate_coverage_curve(const NetworkConfig& cfg, Link link,
                                  const std::vector<double>& rhos) {
    return eval_curve(cfg, link, Mode::Sinr, "rate_coverage", false, true, rhos, true);
}

CoverageCurve rate_coverage_curve_serial(const NetworkConfig& cfg, Link link,
                                         const std::vector<double>& rhos) {
    return eval_curve(cfg, link, Mode::Sinr, "rate_coverage", false, true, rhos,
                      false);
}

}  // namespace hetnet
