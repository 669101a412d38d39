#include "hetnet/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hetnet/association.hpp"
#include "hetnet/coverage.hpp"
#include "hetnet/montecarlo.hpp"

namespace hetnet {

namespace {

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError("sweep key '" + key + "' has non-numeric value '" + text + "'");
    return v;
}

std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("sweep key '" + key + "' has an empty list entry");
        out.push_back(parse_number(key, item));
    }
    return out;
}

// 12 significant digits, the CSV serialization contract.
std::string num12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f << content;
        if (!f) throw std::runtime_error("cannot write " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

SweepMetric metric_from_name(const std::string& name) {
    for (int m = 0; m < kSweepMetricCount; ++m)
        if (name == sweep_metric_name(static_cast<SweepMetric>(m)))
            return static_cast<SweepMetric>(m);
    throw ConfigError("unknown metric '" + name + "'");
}

// Everything computed for one sweep value; rows are assembled afterwards in
// sweep order so output never depends on scheduling.
struct PointData {
    std::array<double, kTierCount> a_dl{};
    std::array<double, kTierCount> a_ul{};
    double decoupled = 0.0;
    std::vector<double> sinr_ana[2];  // per link, aligned with the dB grid
    std::vector<double> rate_ana[2];
    double asr[2] = {0.0, 0.0};
    CampaignResult mc;
    bool has_mc = false;
    std::string error;  // non-empty marks the point failed
};

const CoverageCurve* find_curve(const CampaignResult& res, const char* metric, Link link) {
    for (const CoverageCurve& c : res.curves)
        if (c.metric == metric && c.link == link) return &c;
    return nullptr;
}

}  // namespace

const char* sweep_metric_name(SweepMetric m) {
    switch (m) {
        case SweepMetric::Association: return "association";
        case SweepMetric::DecoupledFraction: return "decoupled_fraction";
        case SweepMetric::SinrCoverage: return "sinr_coverage";
        case SweepMetric::RateCoverage: return "rate_coverage";
        case SweepMetric::Asr: return "asr";
    }
    return "?";
}

const char* tool_version() { return "1.0.0"; }

SweepSpec parse_sweep_text(const std::string& text) {
    static const char* kKnown[] = {"parameter", "values",     "start",
                                   "stop",      "count",      "scale",
                                   "metrics",   "link",       "thresholds",
                                   "rate_thresholds",         "eta_total",
                                   "mc_drops",  "mc_seed"};
    std::map<std::string, std::string> kv;
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
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (std::find_if(std::begin(kKnown), std::end(kKnown),
                         [&](const char* k) { return key == k; }) == std::end(kKnown))
            throw ConfigError("line " + std::to_string(lineno) + ": unknown sweep key '" +
                              key + "'");
        if (kv.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
        kv[key] = trim(line.substr(eq + 1));
    }

    SweepSpec spec;
    if (!kv.count("parameter") || kv["parameter"].empty())
        throw ConfigError("sweep is missing 'parameter'");
    spec.parameter = kv["parameter"];
    if (spec.parameter != "eta" && !is_config_key(spec.parameter))
        throw ConfigError("unknown sweep parameter '" + spec.parameter + "'");

    const bool has_range = kv.count("start") || kv.count("stop") || kv.count("count");
    if (kv.count("values") && has_range)
        throw ConfigError("give either 'values' or a start/stop/count range, not both");
    if (kv.count("values")) {
        spec.values = parse_number_list("values", kv["values"]);
    } else if (has_range) {
        if (!kv.count("start") || !kv.count("stop") || !kv.count("count"))
            throw ConfigError("a range needs all of start, stop, count");
        const double start = parse_number("start", kv["start"]);
        const double stop = parse_number("stop", kv["stop"]);
        const double countv = parse_number("count", kv["count"]);
        if (countv < 1.0 || countv != std::floor(countv))
            throw ConfigError("'count' must be a positive integer");
        const int count = static_cast<int>(countv);
        std::string scale = kv.count("scale") ? kv["scale"] : "lin";
        if (scale != "lin" && scale != "log")
            throw ConfigError("'scale' must be lin or log");
        if (scale == "log" && (start <= 0.0 || stop <= 0.0))
            throw ConfigError("log scale needs positive endpoints");
        for (int i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            spec.values.push_back(scale == "log" ? start * std::pow(stop / start, t)
                                                 : start + (stop - start) * t);
        }
    }
    if (spec.values.empty()) throw ConfigError("no sweep values");

    if (!kv.count("metrics") || kv["metrics"].empty())
        throw ConfigError("sweep is missing 'metrics'");
    {
        std::istringstream ms(kv["metrics"]);
        std::string item;
        while (std::getline(ms, item, ',')) {
            const SweepMetric m = metric_from_name(trim(item));
            if (std::find(spec.metrics.begin(), spec.metrics.end(), m) ==
                spec.metrics.end())
                spec.metrics.push_back(m);
        }
    }

    if (kv.count("link")) {
        const std::string& l = kv["link"];
        if (l == "dl") spec.link = LinkChoice::Dl;
        else if (l == "ul") spec.link = LinkChoice::Ul;
        else if (l == "both") spec.link = LinkChoice::Both;
        else throw ConfigError("'link' must be dl, ul, or both");
    }
    if (kv.count("thresholds"))
        spec.sinr_thresholds_db = parse_number_list("thresholds", kv["thresholds"]);
    if (kv.count("rate_thresholds"))
        spec.rate_thresholds = parse_number_list("rate_thresholds", kv["rate_thresholds"]);

    if (spec.parameter == "eta") {
        if (!kv.count("eta_total"))
            throw ConfigError("eta sweeps must declare 'eta_total' (lambda_2 + lambda_3)");
        spec.eta_total = parse_number("eta_total", kv["eta_total"]);
        if (!(spec.eta_total > 0.0)) throw ConfigError("'eta_total' must be positive");
        for (double v : spec.values)
            if (v < 0.0 || v > 1.0)
                throw ConfigError("eta values must lie in [0, 1]");
    } else if (kv.count("eta_total")) {
        throw ConfigError("'eta_total' only applies to eta sweeps");
    }

    if (kv.count("mc_drops")) {
        const double d = parse_number("mc_drops", kv["mc_drops"]);
        if (d < 0.0 || d != std::floor(d))
            throw ConfigError("'mc_drops' must be a nonnegative integer");
        if (d > 0.0) {
            McSettings mc;
            mc.n_drops = static_cast<std::size_t>(d);
            if (kv.count("mc_seed"))
                mc.seed = static_cast<std::uint64_t>(parse_number("mc_seed", kv["mc_seed"]));
            spec.mc = mc;
        }
    } else if (kv.count("mc_seed")) {
        throw ConfigError("'mc_seed' without 'mc_drops'");
    }
    return spec;
}

SweepSpec load_sweep_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open sweep file " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_sweep_text(buf.str());
}

RawConfig apply_sweep_value(const RawConfig& base, const SweepSpec& spec, double value) {
    RawConfig raw = base;
    if (spec.parameter == "eta") {
        raw.values["lambda_2"] = (1.0 - value) * spec.eta_total;
        raw.values["lambda_3"] = value * spec.eta_total;
    } else {
        raw.values[spec.parameter] = value;
    }
    return raw;
}

int run_sweep(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    const auto t_start = std::chrono::steady_clock::now();
    RawConfig base;
    SweepSpec spec;
    try {
        base = load_config_file(opts.config_path);
        spec = load_sweep_file(opts.sweep_path);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return 2;
    }
    try {
        const std::vector<std::string> violations = validate(build_config(base));
        if (!violations.empty()) {
            for (const std::string& v : violations) err << "config violation: " << v << '\n';
            return 2;
        }
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return 2;
    }

    McSettings mc;
    bool has_mc = spec.mc.has_value();
    if (spec.mc) mc = *spec.mc;
    if (opts.mc_drops) {
        mc.n_drops = *opts.mc_drops;
        has_mc = mc.n_drops > 0;
    }
    if (opts.seed) mc.seed = *opts.seed;
#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif

    auto want = [&](SweepMetric m) {
        return std::find(spec.metrics.begin(), spec.metrics.end(), m) != spec.metrics.end();
    };
    std::vector<Link> links;
    if (spec.link != LinkChoice::Ul) links.push_back(Link::DL);
    if (spec.link != LinkChoice::Dl) links.push_back(Link::UL);

    const std::vector<double> sinr_grid = spec.sinr_thresholds_db.empty()
                                              ? default_sinr_grid_db()
                                              : spec.sinr_thresholds_db;
    const std::vector<double> rate_grid =
        spec.rate_thresholds.empty() ? default_rate_grid() : spec.rate_thresholds;

    const std::size_t n = spec.values.size();
    std::vector<NetworkConfig> cfgs(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            cfgs[i] = build_config(apply_sweep_value(base, spec, spec.values[i]));
            const std::vector<std::string> violations = validate(cfgs[i]);
            if (!violations.empty()) throw ConfigError(violations.front());
        } catch (const std::exception& e) {
            err << "sweep point " << num12(spec.values[i]) << ": " << e.what() << '\n';
            return 1;
        }
    }

    std::vector<PointData> pts(n);

    // Scalar analytics: independent across sweep values.
    const std::int64_t total = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < total; ++i) {
        PointData& p = pts[i];
        try {
            if (want(SweepMetric::Association)) {
                for (TierId k : kAllTiers) {
                    const int t = static_cast<int>(k);
                    for (Link link : links)
                        (link == Link::DL ? p.a_dl[t] : p.a_ul[t]) =
                            association_probability(cfgs[i], link, k);
                }
            }
            if (want(SweepMetric::DecoupledFraction))
                p.decoupled = decoupled_fraction(cfgs[i]);
            if (want(SweepMetric::Asr))
                for (Link link : links)
                    p.asr[static_cast<int>(link)] = area_sum_rate(cfgs[i], link);
        } catch (const std::exception& e) {
            p.error = e.what();
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!pts[i].error.empty()) {
            err << "sweep point " << num12(spec.values[i]) << ": " << pts[i].error << '\n';
            return 1;
        }

    // Threshold curves: the curve evaluators parallelize across grid points.
    for (std::size_t i = 0; i < n; ++i) {
        const char* metric = "";
        try {
            for (Link link : links) {
                const int l = static_cast<int>(link);
                if (want(SweepMetric::SinrCoverage)) {
                    metric = "sinr_coverage";
                    pts[i].sinr_ana[l] = sinr_coverage_curve(cfgs[i], link, sinr_grid).analytical;
                }
                if (want(SweepMetric::RateCoverage)) {
                    metric = "rate_coverage";
                    pts[i].rate_ana[l] = rate_coverage_curve(cfgs[i], link, rate_grid).analytical;
                }
            }
        } catch (const std::exception& e) {
            err << "metric " << metric << ", sweep point " << num12(spec.values[i]) << ": "
                << e.what() << '\n';
            return 1;
        }
    }

    // Monte Carlo campaigns: drops parallelized inside run_campaign.
    if (has_mc) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                CampaignRequest req;
                req.sinr_dl = want(SweepMetric::SinrCoverage) && spec.link != LinkChoice::Ul;
                req.sinr_ul = want(SweepMetric::SinrCoverage) && spec.link != LinkChoice::Dl;
                req.rate_dl = want(SweepMetric::RateCoverage) && spec.link != LinkChoice::Ul;
                req.rate_ul = want(SweepMetric::RateCoverage) && spec.link != LinkChoice::Dl;
                req.sinr_grid_db = sinr_grid;
                req.rate_grid = rate_grid;
                pts[i].mc = run_campaign(cfgs[i], mc.n_drops,
                                         detail::drop_seed(mc.seed, i), req);
                pts[i].has_mc = true;
            } catch (const std::exception& e) {
                err << "monte carlo, sweep point " << num12(spec.values[i]) << ": "
                    << e.what() << '\n';
                return 1;
            }
        }
    }

    // Assembly, ordered by sweep value; one file per metric.
    static const char* kHeader =
        "sweep_value,link,tier_or_total,threshold,analytical,empirical_mean,empirical_ci99\n";
    auto row = [](const std::string& value, const char* link, const std::string& tier,
                  const std::string& threshold, const std::string& ana,
                  const std::string& emp, const std::string& ci) {
        return value + ',' + link + ',' + tier + ',' + threshold + ',' + ana + ',' + emp +
               ',' + ci + '\n';
    };
    auto opt_ci = [&](const std::vector<double>& ci, std::size_t j) {
        return j < ci.size() ? num12(ci[j]) : std::string();
    };

    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) {
        err << "cannot create " << opts.out_dir.string() << ": " << ec.message() << '\n';
        return 1;
    }

    try {
        for (SweepMetric m : spec.metrics) {
            std::string csv = kHeader;
            for (std::size_t i = 0; i < n; ++i) {
                const std::string value = num12(spec.values[i]);
                const PointData& p = pts[i];
                switch (m) {
                    case SweepMetric::Association:
                        for (Link link : links)
                            for (TierId k : kAllTiers) {
                                const int t = static_cast<int>(k);
                                const bool dl = link == Link::DL;
                                const double ana = dl ? p.a_dl[t] : p.a_ul[t];
                                std::string emp, ci;
                                if (p.has_mc) {
                                    emp = num12(dl ? p.mc.dl_share[t] : p.mc.ul_share[t]);
                                    ci = num12(dl ? p.mc.dl_share_ci[t] : p.mc.ul_share_ci[t]);
                                }
                                csv += row(value, link_name(link), tier_name(k), "",
                                           num12(ana), emp, ci);
                            }
                        break;
                    case SweepMetric::DecoupledFraction:
                        csv += row(value, "both", "total", "", num12(p.decoupled),
                                   p.has_mc ? num12(p.mc.decoupled) : std::string(),
                                   p.has_mc ? num12(p.mc.decoupled_ci) : std::string());
                        break;
                    case SweepMetric::SinrCoverage:
                    case SweepMetric::RateCoverage: {
                        const bool sinr = m == SweepMetric::SinrCoverage;
                        const std::vector<double>& grid = sinr ? sinr_grid : rate_grid;
                        for (Link link : links) {
                            const int l = static_cast<int>(link);
                            const std::vector<double>& ana = sinr ? p.sinr_ana[l] : p.rate_ana[l];
                            const CoverageCurve* curve =
                                p.has_mc ? find_curve(p.mc, sinr ? "sinr_coverage" : "rate_coverage",
                                                      link)
                                         : nullptr;
                            for (std::size_t j = 0; j < grid.size(); ++j)
                                csv += row(value, link_name(link), "total", num12(grid[j]),
                                           num12(ana[j]),
                                           curve ? num12(curve->empirical_mean[j]) : std::string(),
                                           curve ? opt_ci(curve->empirical_ci99, j) : std::string());
                        }
                        break;
                    }
                    case SweepMetric::Asr:
                        for (Link link : links)
                            csv += row(value, link_name(link), "total", "",
                                       num12(p.asr[static_cast<int>(link)]), "", "");
                        break;
                }
            }
            const std::filesystem::path file =
                opts.out_dir / (std::string(sweep_metric_name(m)) + ".csv");
            write_atomic(file, csv);
            out << "wrote " << file.string() << '\n';
        }

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        std::string manifest;
        manifest += "config_digest = " + config_digest(base) + '\n';
        manifest += "parameter = " + spec.parameter + '\n';
        manifest += "points = " + std::to_string(n) + '\n';
        manifest += "mc_drops = " + std::to_string(has_mc ? mc.n_drops : 0) + '\n';
        manifest += "seed = " + std::to_string(mc.seed) + '\n';
        manifest += "tool_version = " + std::string(tool_version()) + '\n';
        manifest += "wall_time_s = " + num12(wall) + '\n';
        write_atomic(opts.out_dir / "manifest.txt", manifest);
        out << "wrote " << (opts.out_dir / "manifest.txt").string() << '\n';
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return 1;
    }
    return 0;
}

int check_config(const std::filesystem::path& config_path, std::ostream& out,
                 std::ostream& err) {
    RawConfig raw;
    NetworkConfig cfg;
    try {
        raw = load_config_file(config_path);
        cfg = build_config(raw);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return 2;
    }
    const std::vector<std::string> violations = validate(cfg);
    if (!violations.empty()) {
        for (const std::string& v : violations) err << "violation: " << v << '\n';
        return 1;
    }
    out << serialize_config(raw_from_config(cfg));
    out << "# digest " << config_digest(cfg) << '\n';
    return 0;
}

}  // namespace hetnet
