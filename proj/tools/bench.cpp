#include <benchmark/benchmark.h>

#include "hetnet/coverage.hpp"
#include "hetnet/model.hpp"
#include "hetnet/montecarlo.hpp"

namespace {

hetnet::NetworkConfig table_cfg() { return hetnet::table_default_config(); }

hetnet::CampaignRequest sinr_request() {
    hetnet::CampaignRequest req;
    req.sinr_dl = true;
    req.sinr_ul = true;
    req.sinr_grid_db = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
    return req;
}

void campaign_serial(benchmark::State& state) {
    const hetnet::NetworkConfig cfg = table_cfg();
    const hetnet::CampaignRequest req = sinr_request();
    const std::size_t drops = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(hetnet::run_campaign_serial(cfg, drops, 42, req));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(drops));
}

void campaign_parallel(benchmark::State& state) {
    const hetnet::NetworkConfig cfg = table_cfg();
    const hetnet::CampaignRequest req = sinr_request();
    const std::size_t drops = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(hetnet::run_campaign(cfg, drops, 42, req));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(drops));
}

void sinr_curve_serial(benchmark::State& state) {
    const hetnet::NetworkConfig cfg = table_cfg();
    const std::vector<double> grid = hetnet::default_sinr_grid_db();
    for (auto _ : state)
        benchmark::DoNotOptimize(hetnet::sinr_coverage_curve_serial(cfg, hetnet::Link::DL, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

void sinr_curve_parallel(benchmark::State& state) {
    const hetnet::NetworkConfig cfg = table_cfg();
    const std::vector<double> grid = hetnet::default_sinr_grid_db();
    for (auto _ : state)
        benchmark::DoNotOptimize(hetnet::sinr_coverage_curve(cfg, hetnet::Link::DL, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

void rate_curve_serial(benchmark::State& state) {
    const hetnet::NetworkConfig cfg = table_cfg();
    const std::vector<double> grid = hetnet::default_rate_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(hetnet::rate_coverage_curve_serial(cfg, hetnet::Link::DL, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

void rate_curve_parallel(benchmark::State& state) {
    const hetnet::NetworkConfig cfg = table_cfg();
    const std::vector<double> grid = hetnet::default_rate_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(hetnet::rate_coverage_curve(cfg, hetnet::Link::DL, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

}  // namespace

BENCHMARK(campaign_serial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(campaign_parallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(sinr_curve_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(sinr_curve_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(rate_curve_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(rate_curve_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
