#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "hetnet/interference.hpp"

using namespace hetnet;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Reference quadrature for the defining kernel integrals, deliberately using
// only the generic integrator (no hypergeometric identities).
double kernel_by_quadrature(double lo, double hi, double alpha, double beta) {
    if (beta == 0.0 || hi <= lo) return 0.0;
    return numerics::integrate(
        [&](double r) { return r / (1.0 + std::pow(r, alpha) / beta); }, lo, hi,
        {1e-13, 1e-11, 500});
}

// Plain recursive Simpson, independent of the adaptive Gauss-Kronrod code.
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}
// rel scales the tolerance by a coarse magnitude estimate so integrands of
// any size recurse a bounded number of levels.
double simpson(const std::function<double(double)>& f, double a, double b,
               double rel = 1e-10) {
    if (b <= a) return 0.0;
    double scale = 0.0;
    for (int j = 0; j <= 32; ++j)
        scale += std::abs(f(a + (b - a) * j / 32.0)) * (b - a) / 32.0;
    const double eps = std::max(rel * scale, 1e-300);
    const double m = 0.5 * (a + b), fa = f(a), fm = f(m), fb = f(b);
    return simpson_rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 40);
}

struct MeanCi {
    double mean = 0.0;
    double halfwidth99 = 0.0;
};
MeanCi summarize(const std::vector<double>& xs) {
    double m = 0.0;
    for (double v : xs) m += v;
    m /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double v : xs) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0));
    return {m, 2.576 * sd / std::sqrt(static_cast<double>(xs.size()))};
}

}  // namespace

TEST_CASE("kernel_v matches direct quadrature and its closed forms") {
    CHECK(kernel_v(10.0, 3.0, 0.0) == 0.0);
    CHECK(kernel_v(0.0, 3.0, 0.0) == 0.0);

    // alpha = 4 collapses to an arctangent.
    for (double x : {0.3, 1.0, 2.5, 20.0})
        for (double beta : {0.05, 1.0, 30.0, 1e4})
            CHECK(kernel_v(x, 4.0, beta) ==
                  doctest::Approx(0.5 * std::sqrt(beta) * std::atan(std::sqrt(beta) / (x * x)))
                      .epsilon(1e-12));

    CHECK(kernel_v(1.0, 4.0, 1.0) ==
          doctest::Approx(kernel_by_quadrature(1.0, kInf, 4.0, 1.0)).epsilon(1e-10));
    CHECK(kernel_v(50.0, 3.0, 1e4) ==
          doctest::Approx(kernel_by_quadrature(50.0, kInf, 3.0, 1e4)).epsilon(1e-8));

    // At x = 0 the tail integral has a closed form; quadrature cross-check.
    for (double alpha : {2.5, 3.0, 3.7})
        for (double beta : {0.1, 5.0, 2e3}) {
            const double closed =
                std::pow(beta, 2.0 / alpha) * (kPi / alpha) / std::sin(2.0 * kPi / alpha);
            CHECK(kernel_v(0.0, alpha, beta) == doctest::Approx(closed).epsilon(1e-13));
            CHECK(kernel_v(0.0, alpha, beta) ==
                  doctest::Approx(kernel_by_quadrature(0.0, kInf, alpha, beta)).epsilon(1e-8));
        }

    const double xs[5] = {0.5, 5.0, 50.0, 300.0, 2000.0};
    const double alphas[5] = {2.2, 2.92, 3.0, 3.5, 4.0};
    const double betas[5] = {1e-2, 1.0, 1e2, 1e4, 1e7};
    for (double x : xs)
        for (double alpha : alphas)
            for (double beta : betas)
                CHECK(kernel_v(x, alpha, beta) ==
                      doctest::Approx(kernel_by_quadrature(x, kInf, alpha, beta))
                          .epsilon(1e-8));
}

TEST_CASE("kernel_v rejects divergent tails and negative inputs") {
    CHECK_THROWS_AS((void)kernel_v(1.0, 2.0, 1.0), std::domain_error);
    CHECK_THROWS_AS((void)kernel_v(1.0, 1.7, 1.0), std::domain_error);
    CHECK_THROWS_AS((void)kernel_v(-1.0, 3.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)kernel_v(1.0, 3.0, -2.0), std::invalid_argument);
}

TEST_CASE("kernel_w integrates the blockage-weighted kernel") {
    BlockageModel ball{0.2, 200.0};

    CHECK(kernel_w(PathKind::LoS, 200.0, 2.0, 5.0, ball) == 0.0);
    CHECK(kernel_w(PathKind::LoS, 350.0, 2.0, 5.0, ball) == 0.0);
    CHECK(kernel_w(PathKind::LoS, 10.0, 2.0, 0.0, ball) == 0.0);
    CHECK(kernel_w(PathKind::NLoS, 10.0, 2.92, 0.0, ball) == 0.0);

    // alpha = 2 has a logarithmic antiderivative.
    CHECK(kernel_w(PathKind::LoS, 0.0, 2.0, 1.0, ball) ==
          doctest::Approx(0.1 * std::log(40001.0)).epsilon(1e-10));

    for (double alpha : {1.5, 2.0, 2.5, 2.92})
        for (double beta : {1e-2, 1.0, 1e3, 1e6})
            for (double x : {0.0, 30.0, 150.0}) {
                CHECK(kernel_w(PathKind::LoS, x, alpha, beta, ball) ==
                      doctest::Approx(0.2 * kernel_by_quadrature(x, 200.0, alpha, beta))
                          .epsilon(1e-8));
                if (alpha > 2.0) {
                    const double want =
                        0.8 * kernel_by_quadrature(x, 200.0, alpha, beta) +
                        kernel_by_quadrature(std::max(x, 200.0), kInf, alpha, beta);
                    CHECK(kernel_w(PathKind::NLoS, x, alpha, beta, ball) ==
                          doctest::Approx(want).epsilon(1e-8));
                }
            }

    // Spot value: NLoS tail beyond the ball plus the blocked core.
    CHECK(kernel_w(PathKind::NLoS, 10.0, 2.92, 1e3, ball) ==
          doctest::Approx(0.8 * kernel_by_quadrature(10.0, 200.0, 2.92, 1e3) +
                          kernel_by_quadrature(200.0, kInf, 2.92, 1e3))
              .epsilon(1e-8));

    // With one common exponent the two pieces reassemble the plain tail.
    for (double beta : {0.5, 1e2, 1e5})
        for (double x : {0.0, 40.0, 180.0, 500.0})
            CHECK(kernel_w(PathKind::LoS, x, 2.92, beta, ball) +
                      kernel_w(PathKind::NLoS, x, 2.92, beta, ball) ==
                  doctest::Approx(kernel_v(x, 2.92, beta)).epsilon(1e-12));

    CHECK_THROWS_AS((void)kernel_w(PathKind::NLoS, 10.0, 2.0, 1.0, ball), std::domain_error);
    CHECK_THROWS_AS((void)kernel_w(PathKind::LoS, -1.0, 2.0, 1.0, ball),
                    std::invalid_argument);
}

TEST_CASE("laplace transforms are exactly one at s=0 and never exceed one") {
    NetworkConfig cfg = table_default_config();
    for (TierId k : kAllTiers) {
        const double x = k == TierId::MmLoS ? 80.0 : 120.0;
        CHECK(laplace_dl(cfg, k, 0.0, x) == 1.0);
        CHECK(laplace_ul(cfg, k, 0.0, x) == 1.0);
        for (double s : {1e-2, 1e2, 1e8}) {
            const double dl = laplace_dl(cfg, k, s, x);
            const double ul = laplace_ul(cfg, k, s, x);
            CHECK(dl > 0.0);
            CHECK(dl <= 1.0);
            CHECK(ul >= 0.0);
            CHECK(ul <= 1.0);
        }
    }
}

TEST_CASE("laplace transforms decrease in s and in interferer density") {
    NetworkConfig cfg = table_default_config();
    const double t1 = effective_signal_constant(cfg, TierId::Macro6G, Link::DL);

    LaplaceEvaluator dl_macro(cfg, Link::DL, TierId::Macro6G);
    LaplaceEvaluator ul_mm(cfg, Link::UL, TierId::MmLoS);
    double prev_dl = 1.0 + 1e-15, prev_ul = 1.0 + 1e-15;
    for (double s : {1e-3, 1e-1, 1e1, 1e3}) {
        const double scaled = s / t1 * 1e6;  // sweep around 1/S(100 m)
        const double dl = dl_macro(scaled, 100.0);
        const double ul = ul_mm(s / effective_signal_constant(cfg, TierId::MmLoS, Link::UL) *
                                    2500.0,
                                50.0);
        CHECK(dl < prev_dl);
        CHECK(ul < prev_ul);
        prev_dl = dl;
        prev_ul = ul;
    }

    std::array<double, kTierCount> denser{};
    for (TierId k : kAllTiers) denser[static_cast<int>(k)] = cfg.tier(k).density * 1.5;
    LaplaceEvaluator dl_thick(cfg, Link::DL, TierId::Macro6G, false, denser);
    LaplaceEvaluator ul_thick(cfg, Link::UL, TierId::MmLoS, false, denser);
    const double s_dl = 1e6 / t1;
    CHECK(dl_thick(s_dl, 100.0) < dl_macro(s_dl, 100.0));
    const double s_ul = 2500.0 / effective_signal_constant(cfg, TierId::MmLoS, Link::UL);
    CHECK(ul_thick(s_ul, 50.0) < ul_mm(s_ul, 50.0));

    // The exponent is linear in density: halving it takes a square root.
    std::array<double, kTierCount> halved{};
    for (TierId k : kAllTiers) halved[static_cast<int>(k)] = cfg.tier(k).density * 0.5;
    LaplaceEvaluator dl_half(cfg, Link::DL, TierId::Macro6G, false, halved);
    LaplaceEvaluator dl_mm_full(cfg, Link::DL, TierId::MmLoS);
    LaplaceEvaluator dl_mm_half(cfg, Link::DL, TierId::MmLoS, false, halved);
    CHECK(dl_half(s_dl, 100.0) ==
          doctest::Approx(std::sqrt(dl_macro(s_dl, 100.0))).epsilon(1e-12));
    const double s_mm = 2500.0 / effective_signal_constant(cfg, TierId::MmLoS, Link::DL);
    CHECK(dl_mm_half(s_mm, 50.0) ==
          doctest::Approx(std::sqrt(dl_mm_full(s_mm, 50.0))).epsilon(1e-12));
}

TEST_CASE("each band ignores the other band's stations") {
    NetworkConfig cfg = table_default_config();
    NetworkConfig more_mm = cfg;
    more_mm.tier(TierId::MmLoS).density *= 4.0;
    more_mm.tier(TierId::MmNLoS).density *= 4.0;
    NetworkConfig more_sub = cfg;
    more_sub.tier(TierId::Macro6G).density *= 4.0;
    more_sub.tier(TierId::Small6G).density *= 4.0;

    const double s1 = 1e6 / effective_signal_constant(cfg, TierId::Macro6G, Link::DL);
    CHECK(laplace_dl(cfg, TierId::Macro6G, s1, 100.0) ==
          laplace_dl(more_mm, TierId::Macro6G, s1, 100.0));

    const double s3 = 2500.0 / effective_signal_constant(cfg, TierId::MmLoS, Link::DL);
    CHECK(laplace_dl(cfg, TierId::MmLoS, s3, 50.0) ==
          laplace_dl(more_sub, TierId::MmLoS, s3, 50.0));
    CHECK(laplace_ul(cfg, TierId::MmNLoS, s3, 220.0) ==
          laplace_ul(more_sub, TierId::MmNLoS, s3, 220.0));

    // Uplink sub-6 interference does see mmWave density indirectly (it
    // reshapes the interferers' own serving distances), but the mmWave
    // *interferer process* must not enter: scaling it via the override
    // leaves the value untouched.
    std::array<double, kTierCount> scaled_mm{};
    for (TierId k : kAllTiers) scaled_mm[static_cast<int>(k)] = cfg.tier(k).density;
    scaled_mm[static_cast<int>(TierId::MmLoS)] *= 4.0;
    scaled_mm[static_cast<int>(TierId::MmNLoS)] *= 4.0;
    LaplaceEvaluator ul_plain(cfg, Link::UL, TierId::Small6G);
    LaplaceEvaluator ul_scaled(cfg, Link::UL, TierId::Small6G, false, scaled_mm);
    CHECK(ul_plain(s1, 60.0) == ul_scaled(s1, 60.0));
}

TEST_CASE("beam mixture degenerates when the lobes coincide") {
    NetworkConfig narrow = table_default_config();
    narrow.antenna.side_gain = narrow.antenna.main_gain;
    NetworkConfig wide = narrow;
    wide.antenna.beamwidth = 2.0 * kPi;

    const double s = 2500.0 / effective_signal_constant(narrow, TierId::MmLoS, Link::DL);
    for (double x : {20.0, 50.0, 120.0})
        for (double mult : {0.2, 1.0, 8.0}) {
            CHECK(laplace_dl(narrow, TierId::MmLoS, s * mult, x) ==
                  doctest::Approx(laplace_dl(wide, TierId::MmLoS, s * mult, x))
                      .epsilon(1e-12));
            CHECK(laplace_ul(narrow, TierId::MmNLoS, s * mult, 1.1 * x) ==
                  doctest::Approx(laplace_ul(wide, TierId::MmNLoS, s * mult, 1.1 * x))
                      .epsilon(1e-12));
        }
}

TEST_CASE("uplink mmwave transform equals a downlink transform run at UE power") {
    NetworkConfig cfg = table_default_config();
    NetworkConfig swapped = cfg;
    swapped.tier(TierId::MmLoS).dl_power = cfg.ue_power;
    swapped.tier(TierId::MmNLoS).dl_power = cfg.ue_power;

    for (double x : {25.0, 60.0, 150.0})
        for (double smult : {0.3, 1.0, 5.0}) {
            const double s =
                smult * x * x / effective_signal_constant(cfg, TierId::MmLoS, Link::UL);
            CHECK(laplace_ul(cfg, TierId::MmLoS, s, x) ==
                  doctest::Approx(laplace_dl(swapped, TierId::MmLoS, s, x)).epsilon(1e-12));
        }
}

TEST_CASE("downlink transform matches Monte Carlo interference draws") {
    NetworkConfig cfg = table_default_config();
    const TierId k = TierId::Macro6G;
    const double x = 100.0;
    const double t1 = effective_signal_constant(cfg, k, Link::DL);
    const double s = std::pow(x, cfg.tier(k).alpha) / t1;  // 1 / S_DL(x)

    const double window = 6000.0;
    std::mt19937_64 rng(77001u);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // Interference beyond the window folds in exactly through the kernel.
    double tail = 0.0;
    for (TierId i : {TierId::Macro6G, TierId::Small6G}) {
        const double beta = s * effective_signal_constant(cfg, i, Link::DL);
        tail += 2.0 * kPi * cfg.tier(i).density * kernel_v(window, cfg.tier(i).alpha, beta);
    }

    const int draws = 10000;
    std::vector<double> vals(draws);
    for (int d = 0; d < draws; ++d) {
        double si = 0.0;
        for (TierId i : {TierId::Macro6G, TierId::Small6G}) {
            const double guard = transfer(cfg, Link::DL, k, i, x);
            const double g2 = guard * guard, w2 = window * window;
            if (g2 >= w2) continue;
            const double beta = s * effective_signal_constant(cfg, i, Link::DL);
            std::poisson_distribution<int> count(cfg.tier(i).density * kPi * (w2 - g2));
            const int n = count(rng);
            for (int m = 0; m < n; ++m) {
                const double r2 = g2 + u01(rng) * (w2 - g2);
                const double fade = -std::log1p(-u01(rng));
                si += beta * fade * std::pow(r2, -0.5 * cfg.tier(i).alpha);
            }
        }
        vals[d] = std::exp(-si) * std::exp(-tail);
    }
    const MeanCi est = summarize(vals);
    const double analytic = laplace_dl(cfg, k, s, x);
    CHECK(analytic > 0.05);
    CHECK(analytic < 0.95);
    CHECK(std::abs(est.mean - analytic) < est.halfwidth99);
}

TEST_CASE("uplink mmwave transform matches Monte Carlo draws") {
    NetworkConfig cfg = table_default_config();
    const TierId k = TierId::MmLoS;
    const double x = 50.0;
    const double tl = effective_signal_constant(cfg, TierId::MmLoS, Link::UL);
    const double tn = effective_signal_constant(cfg, TierId::MmNLoS, Link::UL);

    // At 1/S(x) the narrow-beam mixture leaves the transform within noise of
    // one; bisect for an s where its value is informative.
    LaplaceEvaluator eval(cfg, Link::UL, k);
    double lo_mult = 1.0, hi_mult = 1e12;
    const double s0 = std::pow(x, cfg.tier(k).alpha) / tl;
    for (int it = 0; it < 80; ++it) {
        const double mid = std::sqrt(lo_mult * hi_mult);
        (eval(s0 * mid, x) > 0.5 ? lo_mult : hi_mult) = mid;
    }
    const double s = s0 * lo_mult;

    const double guard_l = transfer(cfg, Link::UL, k, TierId::MmLoS, x);
    const double guard_n = transfer(cfg, Link::UL, k, TierId::MmNLoS, x);
    const double ghat[2] = {1.0, cfg.antenna.side_gain / cfg.antenna.main_gain};
    const double pg[2] = {cfg.antenna.main_prob(), cfg.antenna.side_prob()};

    const double window = 9000.0;
    double tail = 0.0;
    for (int g = 0; g < 2; ++g)
        tail += 2.0 * kPi * cfg.tier(k).density * pg[g] *
                kernel_v(window, cfg.tier(TierId::MmNLoS).alpha, s * tn * ghat[g]);

    std::mt19937_64 rng(77002u);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double w2 = window * window;
    const double rb = cfg.blockage.los_radius, rb2 = rb * rb;

    const int draws = 10000;
    std::vector<double> vals(draws);
    for (int d = 0; d < draws; ++d) {
        double si = 0.0;
        std::poisson_distribution<int> count(cfg.tier(k).density * kPi * w2);
        const int n = count(rng);
        for (int m = 0; m < n; ++m) {
            const double r2 = u01(rng) * w2;
            const bool los = r2 < rb2 && u01(rng) < cfg.blockage.los_fraction;
            const double guard = los ? guard_l : guard_n;
            if (r2 <= guard * guard) continue;
            const double alpha = los ? cfg.tier(TierId::MmLoS).alpha
                                     : cfg.tier(TierId::MmNLoS).alpha;
            const double strength = los ? tl : tn;
            const double gain = u01(rng) < pg[0] ? ghat[0] : ghat[1];
            const double fade = -std::log1p(-u01(rng));
            si += s * strength * gain * fade * std::pow(r2, -0.5 * alpha);
        }
        vals[d] = std::exp(-si) * std::exp(-tail);
    }
    const MeanCi est = summarize(vals);
    const double analytic = laplace_ul(cfg, k, s, x);
    CHECK(analytic > 0.3);
    CHECK(analytic < 0.7);
    CHECK(std::abs(est.mean - analytic) < est.halfwidth99);
}

TEST_CASE("uplink sub-6 transform matches an independent nested quadrature") {
    NetworkConfig cfg = table_default_config();
    for (TierId k : {TierId::Macro6G, TierId::Small6G}) {
        const double x = k == TierId::Macro6G ? 80.0 : 40.0;
        const double expo = (1.0 - cfg.tier(k).pc_fraction) * cfg.tier(k).alpha;
        const double s = std::pow(x, expo) / effective_signal_constant(cfg, k, Link::UL);

        double total = 0.0;
        for (TierId i : {TierId::Macro6G, TierId::Small6G}) {
            const double ai = association_probability(cfg, Link::UL, i);
            const double ti = effective_signal_constant(cfg, i, Link::UL);
            const double pc = cfg.tier(i).pc_fraction * cfg.tier(i).alpha;
            const double guard = transfer(cfg, Link::UL, k, i, x);
            auto f = [&](double u) {
                const double w =
                    conditional_distance_density_unnormalized(cfg, Link::UL, i, u);
                if (w == 0.0) return 0.0;
                const double lo = std::max(guard, transfer(cfg, Link::UL, i, k, u));
                return kernel_v(lo, cfg.tier(i).alpha, s * ti * std::pow(u, pc)) * w / ai;
            };
            // Piecewise Simpson split at the exclusion crossover and the
            // conditional-law kinks; the integrand is negligible past 6 km.
            std::vector<double> cuts = detail::association_breakpoints(cfg, Link::UL, i);
            cuts.push_back(transfer(cfg, Link::UL, k, i, guard));
            cuts.push_back(0.0);
            cuts.push_back(6000.0);
            std::sort(cuts.begin(), cuts.end());
            double piecewise = 0.0;
            for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
                piecewise += simpson(f, cuts[j], cuts[j + 1], 1e-11);
            total += 2.0 * kPi * cfg.tier(i).density * piecewise;
        }
        const double analytic = laplace_ul(cfg, k, s, x);
        CHECK(analytic == doctest::Approx(std::exp(-total)).epsilon(1e-6));
    }
}

TEST_CASE("uplink sub-6 transform matches draws with power-controlled interferers") {
    NetworkConfig cfg = table_default_config();
    const TierId k = TierId::Macro6G;
    const double x = 80.0;
    const double expo = (1.0 - cfg.tier(k).pc_fraction) * cfg.tier(k).alpha;
    const double s = std::pow(x, expo) / effective_signal_constant(cfg, k, Link::UL);

    // Inverse-CDF samplers for each interfering tier's serving distance.
    struct Sampler {
        std::vector<double> grid, cum;
        double draw(double u) const {
            const auto it = std::lower_bound(cum.begin(), cum.end(), u);
            const std::size_t j = std::min<std::size_t>(cum.size() - 1,
                                                        std::max<std::ptrdiff_t>(
                                                            1, it - cum.begin()));
            const double span = cum[j] - cum[j - 1];
            const double t = span > 0.0 ? (u - cum[j - 1]) / span : 0.5;
            return grid[j - 1] + t * (grid[j] - grid[j - 1]);
        }
    };
    auto build_sampler = [&](TierId i) {
        Sampler sm;
        const int cells = 4000;
        const double hi = 4000.0;
        sm.grid.resize(cells + 1);
        sm.cum.assign(cells + 1, 0.0);
        for (int j = 0; j <= cells; ++j) sm.grid[j] = hi * j / cells;
        for (int j = 1; j <= cells; ++j) {
            const double a = sm.grid[j - 1], b = sm.grid[j];
            const double fa = conditional_distance_density_unnormalized(cfg, Link::UL, i, a);
            const double fb = conditional_distance_density_unnormalized(cfg, Link::UL, i, b);
            sm.cum[j] = sm.cum[j - 1] + 0.5 * (fa + fb) * (b - a);
        }
        for (double& c : sm.cum) c /= sm.cum.back();
        return sm;
    };
    Sampler sample_u[2] = {build_sampler(TierId::Macro6G), build_sampler(TierId::Small6G)};

    const double window = 6000.0;
    std::mt19937_64 rng(77003u);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // Deterministic tail: beyond the window every interferer is kept.
    double tail = 0.0;
    for (TierId i : {TierId::Macro6G, TierId::Small6G}) {
        const double ai = association_probability(cfg, Link::UL, i);
        const double ti = effective_signal_constant(cfg, i, Link::UL);
        const double pc = cfg.tier(i).pc_fraction * cfg.tier(i).alpha;
        auto f = [&](double u) {
            const double w = conditional_distance_density_unnormalized(cfg, Link::UL, i, u);
            return w == 0.0 ? 0.0
                            : kernel_v(window, cfg.tier(i).alpha,
                                       s * ti * std::pow(u, pc)) *
                                  w / ai;
        };
        tail += 2.0 * kPi * cfg.tier(i).density * simpson(f, 0.0, 4000.0, 1e-10);
    }

    const int draws = 10000;
    std::vector<double> vals(draws);
    const double w2 = window * window;
    for (int d = 0; d < draws; ++d) {
        double si = 0.0;
        for (TierId i : {TierId::Macro6G, TierId::Small6G}) {
            const int j = static_cast<int>(i);
            const double ti = effective_signal_constant(cfg, i, Link::UL);
            const double pc = cfg.tier(i).pc_fraction * cfg.tier(i).alpha;
            const double guard = transfer(cfg, Link::UL, k, i, x);
            std::poisson_distribution<int> count(cfg.tier(i).density * kPi * w2);
            const int n = count(rng);
            for (int m = 0; m < n; ++m) {
                const double r2 = u01(rng) * w2;
                const double u = sample_u[j].draw(u01(rng));
                const double keep_beyond = std::max(guard, transfer(cfg, Link::UL, i, k, u));
                if (r2 <= keep_beyond * keep_beyond) continue;
                const double fade = -std::log1p(-u01(rng));
                si += s * ti * std::pow(u, pc) * fade *
                      std::pow(r2, -0.5 * cfg.tier(i).alpha);
            }
        }
        vals[d] = std::exp(-si) * std::exp(-tail);
    }
    const MeanCi est = summarize(vals);
    const double analytic = laplace_ul(cfg, k, s, x);
    CHECK(analytic > 0.05);
    CHECK(analytic < 0.95);
    CHECK(std::abs(est.mean - analytic) < est.halfwidth99 + 2e-3);
}

TEST_CASE("coupled uplink evaluation reduces to decoupled for a single tier") {
    RawConfig raw = default_raw_config();
    raw.values["lambda_2"] = 0.0;
    raw.values["lambda_3"] = 0.0;
    NetworkConfig cfg = build_config(raw);

    LaplaceEvaluator plain(cfg, Link::UL, TierId::Macro6G, false);
    LaplaceEvaluator coupled(cfg, Link::UL, TierId::Macro6G, true);
    const double t = effective_signal_constant(cfg, TierId::Macro6G, Link::UL);
    for (double x : {40.0, 120.0, 400.0})
        for (double smult : {0.2, 1.0, 4.0}) {
            const double s = smult * std::pow(x, 2.4) / t;
            CHECK(coupled(s, x) == doctest::Approx(plain(s, x)).epsilon(1e-9));
        }

    // With several tiers the two association rules genuinely differ.
    NetworkConfig full = table_default_config();
    LaplaceEvaluator full_plain(full, Link::UL, TierId::Macro6G, false);
    LaplaceEvaluator full_coupled(full, Link::UL, TierId::Macro6G, true);
    const double tf = effective_signal_constant(full, TierId::Macro6G, Link::UL);
    const double sf = std::pow(100.0, 2.4) / tf;
    CHECK(std::abs(full_plain(sf, 100.0) - full_coupled(sf, 100.0)) > 1e-4);
}

TEST_CASE("coupled uplink sub-6 transform matches an independent nested quadrature") {
    // Exclusion geometry follows the downlink transfer distances while the
    // interfering users keep their uplink serving-distance laws.
    NetworkConfig cfg = table_default_config();
    for (TierId k : {TierId::Macro6G, TierId::Small6G}) {
        const double x = k == TierId::Macro6G ? 80.0 : 40.0;
        const double expo = (1.0 - cfg.tier(k).pc_fraction) * cfg.tier(k).alpha;
        const double s = std::pow(x, expo) / effective_signal_constant(cfg, k, Link::UL);

        double total = 0.0;
        for (TierId i : {TierId::Macro6G, TierId::Small6G}) {
            const double ai = association_probability(cfg, Link::UL, i);
            const double ti = effective_signal_constant(cfg, i, Link::UL);
            const double pc = cfg.tier(i).pc_fraction * cfg.tier(i).alpha;
            const double guard = transfer(cfg, Link::DL, k, i, x);
            auto f = [&](double u) {
                const double w =
                    conditional_distance_density_unnormalized(cfg, Link::UL, i, u);
                if (w == 0.0) return 0.0;
                const double lo = std::max(guard, transfer(cfg, Link::DL, i, k, u));
                return kernel_v(lo, cfg.tier(i).alpha, s * ti * std::pow(u, pc)) * w / ai;
            };
            std::vector<double> cuts = detail::association_breakpoints(cfg, Link::UL, i);
            cuts.push_back(transfer(cfg, Link::DL, k, i, guard));
            cuts.push_back(0.0);
            cuts.push_back(6000.0);
            std::sort(cuts.begin(), cuts.end());
            double piecewise = 0.0;
            for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
                piecewise += simpson(f, cuts[j], cuts[j + 1], 1e-11);
            total += 2.0 * kPi * cfg.tier(i).density * piecewise;
        }
        LaplaceEvaluator coupled(cfg, Link::UL, k, true);
        CHECK(coupled(s, x) == doctest::Approx(std::exp(-total)).epsilon(1e-6));
    }
}
