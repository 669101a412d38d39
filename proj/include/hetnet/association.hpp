#pragma once

#include <array>

#include "hetnet/model.hpp"

namespace hetnet {

// Distance to the nearest BS of one tier. Sub-6GHz tiers follow the
// Rayleigh-type nearest-neighbor law; the mmWave LoS/NLoS tiers follow
// blockage-thinned laws. The LoS law is defective: with probability
// `defect` no LoS BS exists at all, and its ccdf saturates at that value
// beyond the blockage ball.
struct DistanceLaw {
    TierId tier = TierId::Macro6G;
    double density = 0.0;
    double los_fraction = 0.0;
    double los_radius = 0.0;
    double defect = 1.0;

    double cdf(double r) const;
    double ccdf(double r) const;
    double pdf(double r) const;
};

DistanceLaw distance_law(const NetworkConfig& cfg, TierId k);

// Transfer functions: the distance at which a tier-i BS would tie the
// association metric of the tier-k serving BS at distance r. Downlink
// metric is B P G C r^-alpha; uplink replaces the transmit power with the
// power-controlled UE power, leaving effective exponent (1-eps) alpha.
double ddtf(const NetworkConfig& cfg, TierId k, TierId i, double r);
double udtf(const NetworkConfig& cfg, TierId k, TierId i, double r);
double transfer(const NetworkConfig& cfg, Link link, TierId k, TierId i, double r);

// P(serving tier on `link` is k) for the typical UE.
double association_probability(const NetworkConfig& cfg, Link link, TierId k);

// Serving-distance density conditioned on associating with tier k.
// The unnormalized form omits the 1/association-probability factor so
// callers holding the probability can avoid recomputing it.
double conditional_distance_density_unnormalized(const NetworkConfig& cfg, Link link,
                                                 TierId k, double x);
double conditional_distance_pdf(const NetworkConfig& cfg, Link link, TierId k, double x);

// Fraction of UEs whose DL and UL serving BSs differ.
double decoupled_fraction(const NetworkConfig& cfg);

struct AssociationReport {
    std::array<double, kTierCount> dl{};
    std::array<double, kTierCount> ul{};
    double decoupled = 0.0;
};
AssociationReport association_report(const NetworkConfig& cfg);

namespace detail {
// Interior quadrature seeds for the serving-distance integrals of tier k:
// radii where some other tier's transfer distance crosses the blockage ball
// (ccdf kink) plus the ball itself for the NLoS law.
std::vector<double> association_breakpoints(const NetworkConfig& cfg, Link link, TierId k);
}  // namespace detail

}  // namespace hetnet
