#include "hetnet/interference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hetnet/numerics.hpp"

namespace hetnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Antiderivative of r / (1 + r^alpha/beta) vanishing at 0; stable while
// r^alpha <= beta (2F1 argument in [-1, 0]).
double primitive_small(double r, double alpha, double beta) {
    if (r == 0.0) return 0.0;
    return 0.5 * r * r *
           numerics::gauss_2f1(2.0 / alpha, 1.0 + 2.0 / alpha, -std::pow(r, alpha) / beta);
}

// Tail integral over [r, inf) in its direct series form; needs alpha > 2 and
// is stable while r^alpha >= beta.
double tail_large(double r, double alpha, double beta) {
    return beta * std::pow(r, 2.0 - alpha) / (alpha - 2.0) *
           numerics::gauss_2f1(1.0 - 2.0 / alpha, 2.0 - 2.0 / alpha, -beta * std::pow(r, -alpha));
}

// Integral of r / (1 + r^alpha/beta) over the finite range [lo, hi] for any
// alpha > 0. Splits at beta^{1/alpha} so each hypergeometric evaluation keeps
// its argument in [-1, 0]; the rare small-alpha outer piece falls back to
// direct quadrature rather than the pole-prone deep-argument inversion.
double finite_range(double lo, double hi, double alpha, double beta) {
    if (beta <= 0.0 || hi <= lo) return 0.0;
    if (alpha == 2.0)
        return 0.5 * beta * (std::log(hi * hi + beta) - std::log(lo * lo + beta));
    const double split = std::pow(beta, 1.0 / alpha);
    if (hi <= split) return primitive_small(hi, alpha, beta) - primitive_small(lo, alpha, beta);
    if (lo >= split) {
        if (alpha > 2.0) return tail_large(lo, alpha, beta) - tail_large(hi, alpha, beta);
        return numerics::integrate(
            [&](double r) { return r / (1.0 + std::pow(r, alpha) / beta); }, lo, hi,
            {1e-12, 1e-10, 200});
    }
    return finite_range(lo, split, alpha, beta) + finite_range(split, hi, alpha, beta);
}

}  // namespace

double kernel_v(double x, double alpha, double beta) {
    if (!(alpha > 2.0))
        throw std::domain_error("kernel_v: divergent tail (alpha must exceed 2)");
    if (!(x >= 0.0)) throw std::invalid_argument("kernel_v: x must be >= 0");
    if (!(beta >= 0.0)) throw std::invalid_argument("kernel_v: beta must be >= 0");
    if (beta == 0.0) return 0.0;
    const double whole =
        std::pow(beta, 2.0 / alpha) * (kPi / alpha) / std::sin(2.0 * kPi / alpha);
    if (x == 0.0) return whole;
    if (std::pow(x, alpha) >= beta) return tail_large(x, alpha, beta);
    return whole - primitive_small(x, alpha, beta);
}

double kernel_w(PathKind kind, double x, double alpha, double beta,
                const BlockageModel& blockage) {
    if (!(x >= 0.0)) throw std::invalid_argument("kernel_w: x must be >= 0");
    if (!(beta >= 0.0)) throw std::invalid_argument("kernel_w: beta must be >= 0");
    if (beta == 0.0) return 0.0;
    if (kind == PathKind::LoS) {
        if (!(alpha > 0.0)) throw std::domain_error("kernel_w: alpha must be > 0");
        if (x >= blockage.los_radius || blockage.los_fraction == 0.0) return 0.0;
        return blockage.los_fraction * finite_range(x, blockage.los_radius, alpha, beta);
    }
    double w = kernel_v(std::max(x, blockage.los_radius), alpha, beta);
    if (x < blockage.los_radius)
        w += (1.0 - blockage.los_fraction) * finite_range(x, blockage.los_radius, alpha, beta);
    return w;
}

LaplaceEvaluator::LaplaceEvaluator(const NetworkConfig& cfg, Link link, TierId serving,
                                   bool coupled_ul,
                                   std::optional<std::array<double, kTierCount>>
                                       interferer_density)
    : cfg_(cfg),
      link_(link),
      serving_(serving),
      coupled_(coupled_ul && link == Link::UL),
      assoc_link_(coupled_ ? Link::DL : link),
      inner_(cfg.quadrature) {
    for (TierId i : kAllTiers) {
        const int j = static_cast<int>(i);
        density_[j] = interferer_density ? (*interferer_density)[j] : cfg_.tier(i).density;
        if (!(density_[j] >= 0.0))
            throw std::invalid_argument("LaplaceEvaluator: interferer density must be >= 0");
    }
    inner_.abs_tol = 1e-8;  // tolerance taken on the Laplace exponent itself
    if (link_ == Link::UL && !is_mmwave(serving_)) {
        // Interfering users always follow their own uplink association; the
        // coupled variant only swaps the exclusion geometry around our
        // station to the downlink transfer distances.
        for (TierId i : {TierId::Macro6G, TierId::Small6G}) {
            const int j = static_cast<int>(i);
            if (density_[j] > 0.0 && cfg_.tier(i).density > 0.0)
                assoc_[j] = association_probability(cfg_, Link::UL, i);
        }
    }
}

double LaplaceEvaluator::sub6_exponent(double s, double x) const {
    double total = 0.0;
    for (TierId i : {TierId::Macro6G, TierId::Small6G}) {
        const int j = static_cast<int>(i);
        if (density_[j] <= 0.0) continue;
        const TierParams& t = cfg_.tier(i);
        const double guard = transfer(cfg_, assoc_link_, serving_, i, x);
        if (link_ == Link::DL) {
            const double strength = s * effective_signal_constant(cfg_, i, Link::DL);
            total += 2.0 * kPi * density_[j] * kernel_v(guard, t.alpha, strength);
            continue;
        }
        // Uplink: interfering users of tier i transmit with power controlled
        // to their own serving distance u; both the exclusion around our
        // station and their own association bound the distance from below.
        if (assoc_[j] <= 0.0) continue;
        const double t_ul = effective_signal_constant(cfg_, i, Link::UL);
        const double pc = t.pc_fraction * t.alpha;
        const double scale = 2.0 * kPi * density_[j] / assoc_[j];
        auto integrand = [&](double u) {
            const double w =
                conditional_distance_density_unnormalized(cfg_, Link::UL, i, u);
            if (w == 0.0) return 0.0;
            const double lo = std::max(guard, transfer(cfg_, assoc_link_, i, serving_, u));
            return scale * kernel_v(lo, t.alpha, s * t_ul * std::pow(u, pc)) * w;
        };
        std::vector<double> knots = detail::association_breakpoints(cfg_, Link::UL, i);
        knots.push_back(transfer(cfg_, assoc_link_, serving_, i, guard));
        total += numerics::integrate(integrand, 0.0,
                                     std::numeric_limits<double>::infinity(), inner_, knots);
    }
    return total;
}

double LaplaceEvaluator::mmwave_exponent(double s, double x) const {
    const double dens_l = density_[static_cast<int>(TierId::MmLoS)];
    const double dens_n = density_[static_cast<int>(TierId::MmNLoS)];
    if (dens_l <= 0.0 && dens_n <= 0.0) return 0.0;
    const double t_l = effective_signal_constant(cfg_, TierId::MmLoS, link_);
    const double t_n = effective_signal_constant(cfg_, TierId::MmNLoS, link_);
    const double guard_l = transfer(cfg_, assoc_link_, serving_, TierId::MmLoS, x);
    const double guard_n = transfer(cfg_, assoc_link_, serving_, TierId::MmNLoS, x);

    const double gain_ratio[2] = {1.0, cfg_.antenna.side_gain / cfg_.antenna.main_gain};
    const double prob[2] = {cfg_.antenna.main_prob(), cfg_.antenna.side_prob()};
    double total = 0.0;
    for (int g = 0; g < 2; ++g) {
        if (prob[g] <= 0.0) continue;
        double lobes = 0.0;
        if (dens_l > 0.0)
            lobes += dens_l * kernel_w(PathKind::LoS, guard_l, cfg_.tier(TierId::MmLoS).alpha,
                                       s * t_l * gain_ratio[g], cfg_.blockage);
        if (dens_n > 0.0)
            lobes += dens_n * kernel_w(PathKind::NLoS, guard_n,
                                       cfg_.tier(TierId::MmNLoS).alpha,
                                       s * t_n * gain_ratio[g], cfg_.blockage);
        total += 2.0 * kPi * prob[g] * lobes;
    }
    return total;
}

double LaplaceEvaluator::operator()(double s, double x) const {
    if (!(s >= 0.0)) throw std::invalid_argument("LaplaceEvaluator: s must be >= 0");
    if (!(x > 0.0)) throw std::invalid_argument("LaplaceEvaluator: x must be > 0");
    if (s == 0.0) return 1.0;
    const double expo =
        is_mmwave(serving_) ? mmwave_exponent(s, x) : sub6_exponent(s, x);
    return std::exp(-expo);
}

double laplace_dl(const NetworkConfig& cfg, TierId k, double s, double x) {
    return LaplaceEvaluator(cfg, Link::DL, k)(s, x);
}

double laplace_ul(const NetworkConfig& cfg, TierId k, double s, double x) {
    return LaplaceEvaluator(cfg, Link::UL, k)(s, x);
}

}  // namespace hetnet
