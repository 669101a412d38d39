#include "hetnet/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hetnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Thermal noise over bandwidth W Hz plus a fixed 10 dB noise figure.
double noise_power_for(double bandwidth_hz) {
    return numerics::dbm_to_watt(-174.0 + 10.0 * std::log10(bandwidth_hz) + 10.0);
}

struct KeySpec {
    const char* key;
    bool required;
    const char* description;
};

// File-facing keys in canonical serialization order.
const KeySpec kGlobalKeys[] = {
    {"lambda_u", true, "UE density, per km^2"},
    {"p_u", true, "UE transmit power, dBm"},
    {"epsilon", true, "uplink power control fraction, sub-6GHz tiers"},
    {"g_mm_main", true, "mmWave main-lobe gain, dBi"},
    {"g_mm_side", true, "mmWave side-lobe gain, dBi"},
    {"theta_b", true, "mmWave main-lobe beamwidth, degrees"},
    {"p_los", true, "LoS probability inside the blockage ball"},
    {"r_ball", true, "blockage ball radius, m"},
    {"w_sub6", true, "sub-6GHz bandwidth, MHz"},
    {"w_mmwave", true, "mmWave bandwidth, MHz"},
};
const KeySpec kTier1Keys[] = {
    {"lambda_1", true, "macro tier BS density, per km^2"},
    {"p_dl_1", true, "macro tier DL transmit power, dBm"},
    {"c_1", true, "macro tier path loss intercept, dB"},
    {"alpha_1", true, "macro tier path loss exponent"},
    {"b_1", false, "macro tier DL association bias, dB"},
    {"b_ul_1", false, "macro tier UL association bias, dB"},
    {"epsilon_1", false, "macro tier power control fraction override"},
};
const KeySpec kTier2Keys[] = {
    {"lambda_2", true, "small-cell tier BS density, per km^2"},
    {"p_dl_2", true, "small-cell tier DL transmit power, dBm"},
    {"c_2", true, "small-cell tier path loss intercept, dB"},
    {"alpha_2", true, "small-cell tier path loss exponent"},
    {"b_2", false, "small-cell tier DL association bias, dB"},
    {"b_ul_2", false, "small-cell tier UL association bias, dB"},
    {"epsilon_2", false, "small-cell tier power control fraction override"},
};
const KeySpec kTier3Keys[] = {
    {"lambda_3", true, "mmWave tier BS density, per km^2"},
    {"p_dl_3", true, "mmWave tier DL transmit power, dBm"},
    {"c_L", true, "mmWave LoS path loss intercept, dB"},
    {"c_N", true, "mmWave NLoS path loss intercept, dB"},
    {"alpha_L", true, "mmWave LoS path loss exponent"},
    {"alpha_N", true, "mmWave NLoS path loss exponent"},
    {"b_3", false, "mmWave tier DL association bias, dB"},
    {"b_ul_3", false, "mmWave tier UL association bias, dB"},
    {"epsilon_3", false, "mmWave power control fraction (must stay 0)"},
};
const KeySpec kQuadKeys[] = {
    {"quad_abs_tol", false, "quadrature absolute tolerance"},
    {"quad_rel_tol", false, "quadrature relative tolerance"},
    {"quad_max_subdivisions", false, "quadrature subdivision cap"},
};

const KeySpec* find_key(const std::string& key) {
    for (const auto* table : {kGlobalKeys, kTier1Keys, kTier2Keys, kTier3Keys, kQuadKeys}) {
        std::size_t n = 0;
        if (table == kGlobalKeys) n = std::size(kGlobalKeys);
        else if (table == kTier1Keys) n = std::size(kTier1Keys);
        else if (table == kTier2Keys) n = std::size(kTier2Keys);
        else if (table == kTier3Keys) n = std::size(kTier3Keys);
        else n = std::size(kQuadKeys);
        for (std::size_t i = 0; i < n; ++i)
            if (key == table[i].key) return &table[i];
    }
    return nullptr;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double require(const RawConfig& raw, const std::string& key) {
    auto it = raw.values.find(key);
    if (it == raw.values.end()) {
        const KeySpec* spec = find_key(key);
        throw ConfigError("missing required key '" + key + "'" +
                          (spec ? std::string(" (") + spec->description + ")" : ""));
    }
    return it->second;
}

double optional(const RawConfig& raw, const std::string& key, double fallback) {
    auto it = raw.values.find(key);
    return it == raw.values.end() ? fallback : it->second;
}

void emit(std::string& out, const RawConfig& raw, const KeySpec& spec) {
    auto it = raw.values.find(spec.key);
    if (it == raw.values.end()) return;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", it->second);
    out += spec.key;
    out += " = ";
    out += buf;
    out += "    # ";
    out += spec.description;
    out += "\n";
}

}  // namespace

const char* tier_name(TierId k) {
    switch (k) {
        case TierId::Macro6G: return "macro";
        case TierId::Small6G: return "small";
        case TierId::MmLoS: return "mm_los";
        case TierId::MmNLoS: return "mm_nlos";
    }
    return "?";
}

const char* link_name(Link v) { return v == Link::DL ? "dl" : "ul"; }

double effective_signal_constant(const NetworkConfig& cfg, TierId k, Link link) {
    const TierParams& t = cfg.tier(k);
    const double power = link == Link::DL ? t.dl_power : cfg.ue_power;
    return power * t.bs_gain * t.intercept;
}

std::vector<std::string> validate(const NetworkConfig& cfg) {
    std::vector<std::string> out;
    auto bad = [&](const std::string& msg) { out.push_back(msg); };

    double total_density = 0.0;
    for (TierId k : kAllTiers) {
        const TierParams& t = cfg.tier(k);
        const std::string who = std::string("tier ") + tier_name(k);
        if (!(t.density >= 0.0)) bad(who + ": density must be >= 0");
        total_density += std::max(t.density, 0.0);
        if (!(t.dl_power > 0.0)) bad(who + ": dl_power must be > 0");
        if (!(t.intercept > 0.0)) bad(who + ": intercept must be > 0");
        if (k == TierId::MmLoS) {
            if (!(t.alpha > 0.0)) bad(who + ": alpha must be > 0");
        } else if (!(t.alpha > 2.0)) {
            bad(who + ": alpha must exceed 2 (interference tail diverges otherwise)");
        }
        if (!(t.dl_bias > 0.0)) bad(who + ": dl_bias must be > 0");
        if (!(t.ul_bias > 0.0)) bad(who + ": ul_bias must be > 0");
        if (!(t.pc_fraction >= 0.0 && t.pc_fraction < 1.0))
            bad(who + ": pc_fraction must lie in [0, 1)");
        if (is_mmwave(k) && t.pc_fraction != 0.0)
            bad(who + ": pc_fraction must be 0 (mmWave uplink transmits at constant power)");
        if (!(t.bandwidth > 0.0)) bad(who + ": bandwidth must be > 0");
        if (!(t.bs_gain > 0.0)) bad(who + ": bs_gain must be > 0");
        if (!(t.noise_power > 0.0)) bad(who + ": noise_power must be > 0");
    }
    if (!(total_density > 0.0)) bad("total BS density must be > 0 across tiers");

    const TierParams& l = cfg.tier(TierId::MmLoS);
    const TierParams& n = cfg.tier(TierId::MmNLoS);
    if (l.density != n.density || l.dl_power != n.dl_power || l.dl_bias != n.dl_bias ||
        l.ul_bias != n.ul_bias || l.bandwidth != n.bandwidth || l.bs_gain != n.bs_gain ||
        l.noise_power != n.noise_power)
        bad("tiers mm_los/mm_nlos: shared physical parameters must match "
            "(they split one deployment)");

    if (!(cfg.antenna.main_gain > 0.0 && cfg.antenna.side_gain > 0.0))
        bad("antenna: gains must be > 0");
    if (cfg.antenna.side_gain > cfg.antenna.main_gain)
        bad("antenna: side_gain must not exceed main_gain");
    if (!(cfg.antenna.beamwidth > 0.0 && cfg.antenna.beamwidth <= 2.0 * kPi))
        bad("antenna: beamwidth must lie in (0, 2*pi]");
    if (!(cfg.blockage.los_fraction >= 0.0 && cfg.blockage.los_fraction <= 1.0))
        bad("blockage: los_fraction must lie in [0, 1]");
    if (!(cfg.blockage.los_radius > 0.0)) bad("blockage: los_radius must be > 0");
    if (!(cfg.ue_density >= 0.0)) bad("ue_density must be >= 0");
    if (!(cfg.ue_power > 0.0)) bad("ue_power must be > 0");
    if (!(cfg.quadrature.abs_tol > 0.0 && cfg.quadrature.rel_tol > 0.0))
        bad("quadrature: tolerances must be > 0");
    if (cfg.quadrature.max_subdivisions < 1)
        bad("quadrature: max_subdivisions must be >= 1");
    return out;
}

RawConfig default_raw_config() {
    RawConfig raw;
    auto& v = raw.values;
    v["lambda_u"] = 200.0;
    v["p_u"] = 23.0;
    v["epsilon"] = 0.2;
    v["g_mm_main"] = 18.0;
    v["g_mm_side"] = -2.0;
    v["theta_b"] = 10.0;
    v["p_los"] = 0.2;
    v["r_ball"] = 200.0;
    v["w_sub6"] = 20.0;
    v["w_mmwave"] = 1000.0;
    v["lambda_1"] = 5.0;
    v["p_dl_1"] = 46.0;
    v["c_1"] = -38.5;
    v["alpha_1"] = 3.0;
    v["lambda_2"] = 30.0;
    v["p_dl_2"] = 40.0;
    v["c_2"] = -38.5;
    v["alpha_2"] = 3.0;
    v["lambda_3"] = 30.0;
    v["p_dl_3"] = 30.0;
    v["c_L"] = -61.4;
    v["c_N"] = -72.0;
    v["alpha_L"] = 2.0;
    v["alpha_N"] = 2.92;
    return raw;
}

RawConfig dense_raw_config() {
    RawConfig raw = default_raw_config();
    raw.values["lambda_1"] = 15.0;
    raw.values["lambda_2"] = 100.0;
    raw.values["lambda_3"] = 100.0;
    raw.values["lambda_u"] = 500.0;
    return raw;
}

bool is_config_key(const std::string& key) { return find_key(key) != nullptr; }

RawConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos) line.erase(cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": malformed section header");
            continue;  // sections are cosmetic; keys are globally unique
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!find_key(key))
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (raw.values.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        char* end = nullptr;
        const double parsed = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0')
            throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                              "' has non-numeric value '" + val + "'");
        raw.values[key] = parsed;
    }
    return raw;
}

RawConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_config(const RawConfig& raw) {
    std::string out;
    out += "[global]\n";
    for (const auto& k : kGlobalKeys) emit(out, raw, k);
    out += "\n[tier_1]\n";
    for (const auto& k : kTier1Keys) emit(out, raw, k);
    out += "\n[tier_2]\n";
    for (const auto& k : kTier2Keys) emit(out, raw, k);
    out += "\n[tier_3]\n";
    for (const auto& k : kTier3Keys) emit(out, raw, k);
    bool any_quad = false;
    for (const auto& k : kQuadKeys) any_quad = any_quad || raw.values.count(k.key);
    if (any_quad) {
        out += "\n[quadrature]\n";
        for (const auto& k : kQuadKeys) emit(out, raw, k);
    }
    return out;
}

NetworkConfig build_config(const RawConfig& raw) {
    using numerics::db_to_linear;
    using numerics::dbm_to_watt;
    NetworkConfig cfg;

    const double w_sub6 = require(raw, "w_sub6") * 1e6;
    const double w_mm = require(raw, "w_mmwave") * 1e6;
    const double eps_sub6 = require(raw, "epsilon");

    for (int i = 0; i < 2; ++i) {
        const std::string sfx = i == 0 ? "_1" : "_2";
        TierParams& t = cfg.tiers[i];
        t.density = require(raw, "lambda" + sfx) * 1e-6;
        t.dl_power = dbm_to_watt(require(raw, "p_dl" + sfx));
        t.intercept = db_to_linear(require(raw, "c" + sfx));
        t.alpha = require(raw, "alpha" + sfx);
        t.dl_bias = db_to_linear(optional(raw, "b" + sfx, 0.0));
        t.ul_bias = db_to_linear(optional(raw, "b_ul" + sfx, 0.0));
        t.pc_fraction = optional(raw, "epsilon" + sfx, eps_sub6);
        t.bandwidth = w_sub6;
        t.bs_gain = 1.0;
        t.noise_power = noise_power_for(w_sub6);
    }

    const double mm_density = require(raw, "lambda_3") * 1e-6;
    const double mm_power = dbm_to_watt(require(raw, "p_dl_3"));
    const double mm_dl_bias = db_to_linear(optional(raw, "b_3", 0.0));
    const double mm_ul_bias = db_to_linear(optional(raw, "b_ul_3", 0.0));
    const double mm_eps = optional(raw, "epsilon_3", 0.0);
    const double mm_gain = db_to_linear(require(raw, "g_mm_main"));
    for (TierId k : {TierId::MmLoS, TierId::MmNLoS}) {
        TierParams& t = cfg.tier(k);
        const bool los = k == TierId::MmLoS;
        t.density = mm_density;
        t.dl_power = mm_power;
        t.intercept = db_to_linear(require(raw, los ? "c_L" : "c_N"));
        t.alpha = require(raw, los ? "alpha_L" : "alpha_N");
        t.dl_bias = mm_dl_bias;
        t.ul_bias = mm_ul_bias;
        t.pc_fraction = mm_eps;
        t.bandwidth = w_mm;
        t.bs_gain = mm_gain;
        t.noise_power = noise_power_for(w_mm);
    }

    cfg.antenna.main_gain = db_to_linear(require(raw, "g_mm_main"));
    cfg.antenna.side_gain = db_to_linear(require(raw, "g_mm_side"));
    cfg.antenna.beamwidth = require(raw, "theta_b") * kPi / 180.0;
    cfg.blockage.los_fraction = require(raw, "p_los");
    cfg.blockage.los_radius = require(raw, "r_ball");
    cfg.ue_density = require(raw, "lambda_u") * 1e-6;
    cfg.ue_power = dbm_to_watt(require(raw, "p_u"));
    cfg.quadrature.abs_tol = optional(raw, "quad_abs_tol", 1e-9);
    cfg.quadrature.rel_tol = optional(raw, "quad_rel_tol", 1e-7);
    cfg.quadrature.max_subdivisions =
        static_cast<int>(optional(raw, "quad_max_subdivisions", 200.0));
    return cfg;
}

RawConfig raw_from_config(const NetworkConfig& cfg) {
    using numerics::linear_to_db;
    using numerics::watt_to_dbm;
    RawConfig raw;
    auto& v = raw.values;
    const TierParams& t1 = cfg.tier(TierId::Macro6G);
    const TierParams& t2 = cfg.tier(TierId::Small6G);
    const TierParams& tl = cfg.tier(TierId::MmLoS);
    const TierParams& tn = cfg.tier(TierId::MmNLoS);

    v["lambda_u"] = cfg.ue_density * 1e6;
    v["p_u"] = watt_to_dbm(cfg.ue_power);
    v["epsilon"] = t1.pc_fraction;
    v["g_mm_main"] = linear_to_db(cfg.antenna.main_gain);
    v["g_mm_side"] = linear_to_db(cfg.antenna.side_gain);
    v["theta_b"] = cfg.antenna.beamwidth * 180.0 / kPi;
    v["p_los"] = cfg.blockage.los_fraction;
    v["r_ball"] = cfg.blockage.los_radius;
    v["w_sub6"] = t1.bandwidth * 1e-6;
    v["w_mmwave"] = tl.bandwidth * 1e-6;

    v["lambda_1"] = t1.density * 1e6;
    v["p_dl_1"] = watt_to_dbm(t1.dl_power);
    v["c_1"] = linear_to_db(t1.intercept);
    v["alpha_1"] = t1.alpha;
    v["b_1"] = linear_to_db(t1.dl_bias);
    v["b_ul_1"] = linear_to_db(t1.ul_bias);

    v["lambda_2"] = t2.density * 1e6;
    v["p_dl_2"] = watt_to_dbm(t2.dl_power);
    v["c_2"] = linear_to_db(t2.intercept);
    v["alpha_2"] = t2.alpha;
    v["b_2"] = linear_to_db(t2.dl_bias);
    v["b_ul_2"] = linear_to_db(t2.ul_bias);
    if (t2.pc_fraction != t1.pc_fraction) v["epsilon_2"] = t2.pc_fraction;

    v["lambda_3"] = tl.density * 1e6;
    v["p_dl_3"] = watt_to_dbm(tl.dl_power);
    v["c_L"] = linear_to_db(tl.intercept);
    v["c_N"] = linear_to_db(tn.intercept);
    v["alpha_L"] = tl.alpha;
    v["alpha_N"] = tn.alpha;
    v["b_3"] = linear_to_db(tl.dl_bias);
    v["b_ul_3"] = linear_to_db(tl.ul_bias);
    if (tl.pc_fraction != 0.0) v["epsilon_3"] = tl.pc_fraction;

    v["quad_abs_tol"] = cfg.quadrature.abs_tol;
    v["quad_rel_tol"] = cfg.quadrature.rel_tol;
    v["quad_max_subdivisions"] = cfg.quadrature.max_subdivisions;
    return raw;
}

NetworkConfig table_default_config() { return build_config(default_raw_config()); }
NetworkConfig dense_default_config() { return build_config(dense_raw_config()); }

std::string config_digest(const RawConfig& raw) {
    const std::string text = serialize_config(raw);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_digest(const NetworkConfig& cfg) {
    return config_digest(raw_from_config(cfg));
}

}  // namespace hetnet
