#pragma once

#include <array>
#include <optional>

#include "hetnet/association.hpp"

namespace hetnet {

// Radial Laplace-exponent kernel of a Rayleigh-faded interference field:
//   V(x, alpha, beta) = integral over r in [x, inf) of r / (1 + r^alpha/beta).
// Evaluated through hypergeometric closed forms, choosing between the direct
// series (large x) and the reduced complementary form (small x) so the 2F1
// argument always stays in [-1, 0].
double kernel_v(double x, double alpha, double beta);

// Blockage-aware variants for the mmWave band. The LoS kernel integrates the
// same density times los_fraction over [x, los_radius) only; the NLoS kernel
// takes the complementary fraction inside the ball plus everything beyond it.
enum class PathKind { LoS, NLoS };
double kernel_w(PathKind kind, double x, double alpha, double beta,
                const BlockageModel& blockage);

// Laplace transform s -> E[exp(-s I)] of the interference seen by a link
// served by one tier at distance x. Downlink interference comes from the
// other stations of the serving band; uplink interference from the active
// users of that band, approximated as independent tier-density PPPs whose
// transmit power follows their own serving distance.
//
// `coupled_ul` evaluates the uplink transform for a user that keeps its
// downlink association: the exclusion geometry switches to downlink
// transfer distances while interfering users keep their own uplink
// association laws and powers. `interferer_density` overrides the density
// of each interfering process (the serving-distance laws keep the configured
// densities), which is how thinned active-station populations are modeled.
class LaplaceEvaluator {
  public:
    LaplaceEvaluator(const NetworkConfig& cfg, Link link, TierId serving,
                     bool coupled_ul = false,
                     std::optional<std::array<double, kTierCount>> interferer_density =
                         std::nullopt);

    // Transform value at s given serving distance x; exactly 1 at s = 0.
    double operator()(double s, double x) const;

    Link link() const { return link_; }
    TierId serving_tier() const { return serving_; }

  private:
    double sub6_exponent(double s, double x) const;
    double mmwave_exponent(double s, double x) const;

    NetworkConfig cfg_;
    Link link_;
    TierId serving_;
    bool coupled_;
    Link assoc_link_;  // which association defines exclusions and inner laws
    std::array<double, kTierCount> density_{};
    std::array<double, kTierCount> assoc_{};  // inner-law normalizers (uplink)
    numerics::QuadratureSpec inner_;
};

// One-shot helpers constructing a fresh evaluator per call.
double laplace_dl(const NetworkConfig& cfg, TierId k, double s, double x);
double laplace_ul(const NetworkConfig& cfg, TierId k, double s, double x);

}  // namespace hetnet
