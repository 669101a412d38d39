#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hetnet/model.hpp"

using namespace hetnet;

TEST_CASE("table defaults validate cleanly") {
    NetworkConfig cfg = table_default_config();
    CHECK(validate(cfg).empty());
    CHECK(validate(dense_default_config()).empty());

    // Spot values after unit conversion.
    CHECK(cfg.tier(TierId::Macro6G).density == doctest::Approx(5e-6).epsilon(1e-14));
    CHECK(cfg.tier(TierId::Macro6G).dl_power ==
          doctest::Approx(39.81071705534972).epsilon(1e-14));
    CHECK(cfg.tier(TierId::MmLoS).density == cfg.tier(TierId::MmNLoS).density);
    CHECK(cfg.tier(TierId::MmLoS).bandwidth == doctest::Approx(1e9));
    CHECK(cfg.tier(TierId::MmLoS).pc_fraction == 0.0);
    CHECK(cfg.tier(TierId::Small6G).pc_fraction == doctest::Approx(0.2));
    CHECK(cfg.antenna.main_prob() == doctest::Approx(10.0 / 360.0).epsilon(1e-14));
    CHECK(cfg.blockage.los_prob(100.0) == doctest::Approx(0.2));
    CHECK(cfg.blockage.los_prob(250.0) == 0.0);
    // sigma^2 = -174 dBm/Hz + 10 log10 W + 10 dB.
    CHECK(cfg.tier(TierId::Macro6G).noise_power ==
          doctest::Approx(7.943282347242789e-13).epsilon(1e-12));
    CHECK(cfg.tier(TierId::MmLoS).noise_power ==
          doctest::Approx(3.9810717055349693e-11).epsilon(1e-12));
}

TEST_CASE("validation names field and rule") {
    NetworkConfig cfg = table_default_config();
    cfg.tier(TierId::Small6G).alpha = 1.5;
    auto v = validate(cfg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("small") != std::string::npos);
    CHECK(v[0].find("alpha") != std::string::npos);

    cfg = table_default_config();
    cfg.blockage.los_fraction = 1.3;
    v = validate(cfg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("los_fraction") != std::string::npos);

    cfg = table_default_config();
    cfg.tier(TierId::MmLoS).pc_fraction = 0.2;
    cfg.tier(TierId::MmNLoS).pc_fraction = 0.2;
    v = validate(cfg);
    CHECK(!v.empty());

    cfg = table_default_config();
    for (TierId k : kAllTiers) cfg.tier(k).density = 0.0;
    v = validate(cfg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("total BS density") != std::string::npos);

    // Breaking the LoS/NLoS pairing is a violation.
    cfg = table_default_config();
    cfg.tier(TierId::MmNLoS).dl_power *= 2.0;
    CHECK(!validate(cfg).empty());
}

TEST_CASE("effective signal constants") {
    NetworkConfig cfg = table_default_config();
    // Macro DL: 46 dBm * 0 dBi * -38.5 dB = 10^-2.25 W.
    CHECK(effective_signal_constant(cfg, TierId::Macro6G, Link::DL) ==
          doctest::Approx(0.00562341325190349).epsilon(1e-13));
    // MmLoS UL: 23 dBm * 18 dBi * -61.4 dB = 10^-5.04 W.
    CHECK(effective_signal_constant(cfg, TierId::MmLoS, Link::UL) ==
          doctest::Approx(9.12010839355910e-06).epsilon(1e-13));

    // Unit power, unit gain, unit intercept collapses to 1.
    cfg.tier(TierId::Macro6G).dl_power = 1.0;
    cfg.tier(TierId::Macro6G).bs_gain = 1.0;
    cfg.tier(TierId::Macro6G).intercept = 1.0;
    CHECK(effective_signal_constant(cfg, TierId::Macro6G, Link::DL) == 1.0);

    // Strictly increasing in each factor.
    NetworkConfig base = table_default_config();
    for (double scale : {1.5, 2.0, 10.0}) {
        NetworkConfig c2 = base;
        c2.tier(TierId::Small6G).dl_power *= scale;
        CHECK(effective_signal_constant(c2, TierId::Small6G, Link::DL) >
              effective_signal_constant(base, TierId::Small6G, Link::DL));
        c2 = base;
        c2.tier(TierId::Small6G).intercept *= scale;
        CHECK(effective_signal_constant(c2, TierId::Small6G, Link::UL) >
              effective_signal_constant(base, TierId::Small6G, Link::UL));
    }
}

TEST_CASE("config serialization round-trips") {
    NetworkConfig cfg = table_default_config();
    cfg.tier(TierId::Small6G).ul_bias = numerics::db_to_linear(7.0);
    cfg.tier(TierId::Small6G).pc_fraction = 0.35;
    RawConfig raw = raw_from_config(cfg);
    NetworkConfig back = build_config(parse_config_text(serialize_config(raw)));

    for (TierId k : kAllTiers) {
        const TierParams& a = cfg.tier(k);
        const TierParams& b = back.tier(k);
        CHECK(b.density == doctest::Approx(a.density).epsilon(1e-12));
        CHECK(b.dl_power == doctest::Approx(a.dl_power).epsilon(1e-12));
        CHECK(b.intercept == doctest::Approx(a.intercept).epsilon(1e-12));
        CHECK(b.alpha == doctest::Approx(a.alpha).epsilon(1e-12));
        CHECK(b.dl_bias == doctest::Approx(a.dl_bias).epsilon(1e-12));
        CHECK(b.ul_bias == doctest::Approx(a.ul_bias).epsilon(1e-12));
        CHECK(b.pc_fraction == doctest::Approx(a.pc_fraction).epsilon(1e-12));
        CHECK(b.bandwidth == doctest::Approx(a.bandwidth).epsilon(1e-12));
        CHECK(b.bs_gain == doctest::Approx(a.bs_gain).epsilon(1e-12));
        CHECK(b.noise_power == doctest::Approx(a.noise_power).epsilon(1e-12));
    }
    CHECK(back.ue_density == doctest::Approx(cfg.ue_density).epsilon(1e-12));
    CHECK(back.ue_power == doctest::Approx(cfg.ue_power).epsilon(1e-12));
    CHECK(back.antenna.beamwidth == doctest::Approx(cfg.antenna.beamwidth).epsilon(1e-12));

    // The digest is computed over the file-unit key-value form, which
    // serialization round-trips exactly (%.17g preserves doubles).
    CHECK(config_digest(raw) == config_digest(parse_config_text(serialize_config(raw))));
    CHECK(config_digest(cfg) != config_digest(dense_default_config()));
}

TEST_CASE("parser reports bad input precisely") {
    RawConfig raw = default_raw_config();
    raw.values.erase("lambda_3");
    try {
        build_config(raw);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("lambda_3") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config_text("lambda_1 = 5\nnot a line\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("lamda_1 = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("lambda_1 = banana\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("lambda_1 = 5\nlambda_1 = 6\n"), ConfigError);

    // mmWave power control is representable but invalid.
    RawConfig eps = default_raw_config();
    eps.values["epsilon_3"] = 0.2;
    auto violations = validate(build_config(eps));
    REQUIRE(!violations.empty());
    CHECK(violations[0].find("pc_fraction") != std::string::npos);
}

TEST_CASE("comments and sections are tolerated") {
    RawConfig raw = default_raw_config();
    std::string text = serialize_config(raw);
    RawConfig again = parse_config_text(text);
    CHECK(again.values == raw.values);
}
