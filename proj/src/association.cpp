#include "hetnet/association.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnet {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponent of the association metric's distance dependence (up to sign):
// alpha for DL, (1 - eps) alpha for UL power-controlled transmission.
double metric_exponent(const NetworkConfig& cfg, Link link, TierId k) {
    const TierParams& t = cfg.tier(k);
    return link == Link::DL ? t.alpha : (1.0 - t.pc_fraction) * t.alpha;
}

double metric_weight(const NetworkConfig& cfg, Link link, TierId k) {
    const TierParams& t = cfg.tier(k);
    const double bias = link == Link::DL ? t.dl_bias : t.ul_bias;
    return bias * effective_signal_constant(cfg, k, link);
}

double transfer_impl(const NetworkConfig& cfg, Link link, TierId k, TierId i, double r) {
    if (i == k) return r;
    const double ratio = metric_weight(cfg, link, i) / metric_weight(cfg, link, k);
    const double ek = metric_exponent(cfg, link, k);
    const double ei = metric_exponent(cfg, link, i);
    return std::pow(ratio, 1.0 / ei) * std::pow(r, ek / ei);
}

// Solves transfer(r) = d for the breakpoint collection.
double transfer_inverse_at(const NetworkConfig& cfg, Link link, TierId k, TierId i,
                           double d) {
    const double ratio = metric_weight(cfg, link, i) / metric_weight(cfg, link, k);
    const double ek = metric_exponent(cfg, link, k);
    const double ei = metric_exponent(cfg, link, i);
    return std::pow(d / std::pow(ratio, 1.0 / ei), ei / ek);
}

double transfer_inverse_at_ball(const NetworkConfig& cfg, Link link, TierId k, TierId i) {
    return transfer_inverse_at(cfg, link, k, i, cfg.blockage.los_radius);
}

bool tier_present(const NetworkConfig& cfg, TierId k) {
    if (cfg.tier(k).density <= 0.0) return false;
    if (k == TierId::MmLoS && cfg.blockage.los_fraction <= 0.0) return false;
    if (k == TierId::MmNLoS && cfg.blockage.los_fraction >= 1.0 &&
        !(cfg.blockage.los_radius < kInf))
        return false;
    return true;
}

// Distance where the tier's exclusion ccdf drops to 1/e; infinite when it
// never does (a defective LoS law).
double exclusion_scale(const NetworkConfig& cfg, TierId k) {
    const double lam = cfg.tier(k).density;
    if (lam <= 0.0) return kInf;
    const double pl = cfg.blockage.los_fraction;
    const double rb = cfg.blockage.los_radius;
    const double t = 1.0 / (kPi * lam);
    switch (k) {
        case TierId::Macro6G:
        case TierId::Small6G:
            return std::sqrt(t);
        case TierId::MmLoS: {
            if (pl <= 0.0) return kInf;
            const double d = std::sqrt(t / pl);
            return d <= rb ? d : kInf;
        }
        case TierId::MmNLoS: {
            if (pl < 1.0) {
                const double d = std::sqrt(t / (1.0 - pl));
                if (d <= rb) return d;
            }
            return std::sqrt(t + pl * rb * rb);
        }
    }
    return kInf;
}

}  // namespace

double DistanceLaw::ccdf(double r) const {
    if (r <= 0.0 || density <= 0.0) return 1.0;
    switch (tier) {
        case TierId::Macro6G:
        case TierId::Small6G:
            return std::exp(-kPi * density * r * r);
        case TierId::MmLoS: {
            const double m = std::min(r, los_radius);
            return std::exp(-kPi * density * los_fraction * m * m);
        }
        case TierId::MmNLoS: {
            const double m = std::min(r, los_radius);
            return std::exp(-kPi * density * (r * r - los_fraction * m * m));
        }
    }
    return 1.0;
}

double DistanceLaw::cdf(double r) const { return 1.0 - ccdf(r); }

double DistanceLaw::pdf(double r) const {
    if (r <= 0.0 || density <= 0.0) return 0.0;
    switch (tier) {
        case TierId::Macro6G:
        case TierId::Small6G:
            return 2.0 * kPi * density * r * std::exp(-kPi * density * r * r);
        case TierId::MmLoS:
            if (r >= los_radius) return 0.0;
            return 2.0 * kPi * density * los_fraction * r * ccdf(r);
        case TierId::MmNLoS: {
            const double keep = r < los_radius ? 1.0 - los_fraction : 1.0;
            return 2.0 * kPi * density * keep * r * ccdf(r);
        }
    }
    return 0.0;
}

DistanceLaw distance_law(const NetworkConfig& cfg, TierId k) {
    DistanceLaw law;
    law.tier = k;
    law.density = cfg.tier(k).density;
    law.los_fraction = cfg.blockage.los_fraction;
    law.los_radius = cfg.blockage.los_radius;
    if (law.density <= 0.0) {
        law.defect = 1.0;
    } else if (k == TierId::MmLoS) {
        law.defect = std::exp(-kPi * law.density * law.los_fraction * law.los_radius *
                              law.los_radius);
    } else {
        law.defect = 0.0;
    }
    return law;
}

double ddtf(const NetworkConfig& cfg, TierId k, TierId i, double r) {
    return transfer_impl(cfg, Link::DL, k, i, r);
}

double udtf(const NetworkConfig& cfg, TierId k, TierId i, double r) {
    return transfer_impl(cfg, Link::UL, k, i, r);
}

double transfer(const NetworkConfig& cfg, Link link, TierId k, TierId i, double r) {
    return transfer_impl(cfg, link, k, i, r);
}

namespace detail {

std::vector<double> association_breakpoints(const NetworkConfig& cfg, Link link, TierId k) {
    std::vector<double> pts;
    for (TierId i : {TierId::MmLoS, TierId::MmNLoS}) {
        if (i == k || !tier_present(cfg, i)) continue;
        const double r = transfer_inverse_at_ball(cfg, link, k, i);
        if (std::isfinite(r) && r > 0.0) pts.push_back(r);
    }
    if (k == TierId::MmNLoS) pts.push_back(cfg.blockage.los_radius);
    // Seed the scale of the serving law and the radius at which each
    // competitor's exclusion begins to bite. When the transfer exponent is
    // large (slowly decaying competitor on the uplink), the surviving mass
    // collapses into a sliver near the origin that plain subdivision of
    // [0, upper] never samples; these knots pin it.
    const double own = exclusion_scale(cfg, k);
    if (std::isfinite(own)) pts.push_back(own);
    for (TierId i : kAllTiers) {
        if (i == k || !tier_present(cfg, i)) continue;
        const double d = exclusion_scale(cfg, i);
        if (!std::isfinite(d)) continue;
        const double r = transfer_inverse_at(cfg, link, k, i, d);
        if (std::isfinite(r) && r > 0.0) pts.push_back(r);
    }
    return pts;
}

}  // namespace detail

double conditional_distance_density_unnormalized(const NetworkConfig& cfg, Link link,
                                                 TierId k, double x) {
    const DistanceLaw law_k = distance_law(cfg, k);
    double v = law_k.pdf(x);
    if (v == 0.0) return 0.0;
    for (TierId i : kAllTiers) {
        if (i == k || !tier_present(cfg, i)) continue;
        v *= distance_law(cfg, i).ccdf(transfer_impl(cfg, link, k, i, x));
    }
    return v;
}

double association_probability(const NetworkConfig& cfg, Link link, TierId k) {
    if (!tier_present(cfg, k)) return 0.0;
    const double upper = k == TierId::MmLoS ? cfg.blockage.los_radius : kInf;
    return numerics::integrate(
        [&](double r) { return conditional_distance_density_unnormalized(cfg, link, k, r); },
        0.0, upper, cfg.quadrature, detail::association_breakpoints(cfg, link, k));
}

double conditional_distance_pdf(const NetworkConfig& cfg, Link link, TierId k, double x) {
    const double a = association_probability(cfg, link, k);
    if (a <= 0.0)
        throw std::domain_error(std::string("conditional_distance_pdf: tier ") +
                                tier_name(k) + " is never selected on this link");
    return conditional_distance_density_unnormalized(cfg, link, k, x) / a;
}

double decoupled_fraction(const NetworkConfig& cfg) {
    double coupled = 0.0;
    for (TierId k : kAllTiers) {
        if (!tier_present(cfg, k)) continue;
        const DistanceLaw law_k = distance_law(cfg, k);
        const double upper = k == TierId::MmLoS ? cfg.blockage.los_radius : kInf;

        // Both links must keep every rival tier beyond its transfer distance,
        // so each rival ccdf is evaluated at the larger of the two.
        auto integrand = [&](double r) {
            double v = law_k.pdf(r);
            if (v == 0.0) return 0.0;
            for (TierId i : kAllTiers) {
                if (i == k || !tier_present(cfg, i)) continue;
                const double far = std::max(transfer_impl(cfg, Link::DL, k, i, r),
                                            transfer_impl(cfg, Link::UL, k, i, r));
                v *= distance_law(cfg, i).ccdf(far);
            }
            return v;
        };

        std::vector<double> pts = detail::association_breakpoints(cfg, Link::DL, k);
        for (double p : detail::association_breakpoints(cfg, Link::UL, k)) pts.push_back(p);
        for (TierId i : kAllTiers) {
            if (i == k || !tier_present(cfg, i)) continue;
            // Crossing radius of the two transfer functions (metric kink).
            const double cd = std::log(metric_weight(cfg, Link::DL, i) /
                                       metric_weight(cfg, Link::DL, k));
            const double cu = std::log(metric_weight(cfg, Link::UL, i) /
                                       metric_weight(cfg, Link::UL, k));
            const double pd = metric_exponent(cfg, Link::DL, k) /
                              metric_exponent(cfg, Link::DL, i);
            const double pu = metric_exponent(cfg, Link::UL, k) /
                              metric_exponent(cfg, Link::UL, i);
            const double ad = cd / cfg.tier(i).alpha;  // exponent-normalized offsets
            const double au = cu / ((1.0 - cfg.tier(i).pc_fraction) * cfg.tier(i).alpha);
            if (pd != pu) {
                const double r = std::exp((au - ad) / (pd - pu));
                if (std::isfinite(r) && r > 0.0) pts.push_back(r);
            }
        }
        coupled += numerics::integrate(integrand, 0.0, upper, cfg.quadrature, pts);
    }
    return 1.0 - coupled;
}

AssociationReport association_report(const NetworkConfig& cfg) {
    AssociationReport rep;
    for (TierId k : kAllTiers) {
        rep.dl[static_cast<int>(k)] = association_probability(cfg, Link::DL, k);
        rep.ul[static_cast<int>(k)] = association_probability(cfg, Link::UL, k);
    }
    rep.decoupled = decoupled_fraction(cfg);
    return rep;
}

}  // namespace hetnet
