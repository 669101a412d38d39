#pragma once

#include <string>
#include <vector>

#include "hetnet/interference.hpp"

namespace hetnet {

// Mean number of users sharing the serving station on tier k (round-robin
// load approximation); >= 1, exactly 1 when the tier never serves anyone.
// The mmWave sub-tiers share the physical deployment density.
double mean_load(const NetworkConfig& cfg, Link link, TierId k);

// P(SINR > tau | served by tier k) for linear threshold tau >= 0.
// Throws std::domain_error when the tier is never selected on this link.
double sinr_coverage_conditional(const NetworkConfig& cfg, Link link, TierId k,
                                 double tau);

// Association-weighted total SINR coverage P(SINR > tau).
double sinr_coverage(const NetworkConfig& cfg, Link link, double tau);

// Uplink coverage for users that keep their downlink serving station:
// downlink association weights and serving laws, uplink transmission.
double sinr_coverage_coupled_ul(const NetworkConfig& cfg, double tau);

// Noise-limited (sparse) regime: the interference factor is dropped.
double snr_coverage_sparse(const NetworkConfig& cfg, Link link, double tau);

// Interference-limited (dense) regime: noise dropped, interferer populations
// thinned to the active-station densities min(lambda_k, lambda_U * A_k); the
// mmWave deployment thins as one population using its combined association
// mass. Serving-distance laws keep the configured densities.
double sir_coverage_dense(const NetworkConfig& cfg, Link link, double tau);

// P(rate > rho) where rate = W_k log2(1 + SINR) / N_k on the serving tier.
// rho in bit/s.
double rate_coverage(const NetworkConfig& cfg, Link link, double rho);

// Area sum rate in bit/s per m^2: bandwidth- and density-weighted integral
// of conditional coverage over the spectral-efficiency axis.
double area_sum_rate(const NetworkConfig& cfg, Link link);

// A sampled metric curve. x_axis units depend on the metric: dB thresholds
// for SINR/SIR/SNR coverage, bit/s for rate coverage. Empirical columns are
// filled by the simulation engine and stay empty otherwise.
struct CoverageCurve {
    std::string metric;
    Link link = Link::DL;
    std::vector<double> x_axis;
    std::vector<double> analytical;
    std::vector<double> empirical_mean;
    std::vector<double> empirical_ci99;
    std::string config_digest;
};

// Default grids: 61 dB points over [-10, 20] and 41 log-spaced rate points
// over [1e5, 1e10] bit/s.
std::vector<double> default_sinr_grid_db();
std::vector<double> default_rate_grid();

// Curve evaluation over a threshold grid. The parallel variants distribute
// grid points across OpenMP threads; results are identical to the serial
// ones regardless of thread count.
CoverageCurve sinr_coverage_curve(const NetworkConfig& cfg, Link link,
                                  const std::vector<double>& taus_db);
CoverageCurve sinr_coverage_curve_serial(const NetworkConfig& cfg, Link link,
                                         const std::vector<double>& taus_db);
CoverageCurve coupled_ul_coverage_curve(const NetworkConfig& cfg,
                                        const std::vector<double>& taus_db);
CoverageCurve rate_coverage_curve(const NetworkConfig& cfg, Link link,
                                  const std::vector<double>& rhos);
CoverageCurve rate_coverage_curve_serial(const NetworkConfig& cfg, Link link,
                                         const std::vector<double>& rhos);

}  // namespace hetnet
