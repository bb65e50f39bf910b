#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "tcast/ingest.hpp"

using namespace tcast;

namespace {

BinningConfig simple_cfg(double t0, double t1, Index bins, Aggregation agg) {
    BinningConfig cfg;
    cfg.t_start = t0;
    cfg.t_end = t1;
    cfg.k_bins = bins;
    cfg.aggregation = agg;
    return cfg;
}

// random log with dyadic values so sums are exact in floating point
std::vector<EventRecord> random_log(std::mt19937_64& rng, std::size_t n_events,
                                    int n_src = 6, int n_tgt = 5, double t1 = 100.0) {
    std::uniform_int_distribution<int> src(0, n_src - 1), tgt(0, n_tgt - 1);
    std::uniform_real_distribution<double> time(-10.0, t1 + 10.0);  // some out-of-window
    std::uniform_int_distribution<int> quarters(0, 40);
    std::vector<EventRecord> events;
    for (std::size_t n = 0; n < n_events; ++n)
        events.push_back({"s" + std::to_string(src(rng)), "t" + std::to_string(tgt(rng)),
                          time(rng), quarters(rng) * 0.25});
    return events;
}

}  // namespace

TEST_CASE("single event fills a 1x1x1 tensor") {
    const std::vector<EventRecord> events = {{"alice", "bob", 5.0, 3.5}};
    const auto built = build_tensor(events, simple_cfg(0, 10, 1, Aggregation::Count));
    REQUIRE(built.tensor.rows() == 1);
    REQUIRE(built.tensor.cols() == 1);
    REQUIRE(built.tensor.depth() == 1);
    CHECK(built.tensor(0, 0, 0) == 1.0);
    CHECK(built.sources.ids[0] == "alice");
    CHECK(built.targets.ids[0] == "bob");
}

TEST_CASE("sum aggregation adds values of the same pair and bin") {
    const std::vector<EventRecord> events = {{"a", "b", 1.0, 2.5}, {"a", "b", 2.0, 1.5}};
    const auto built = build_tensor(events, simple_cfg(0, 10, 1, Aggregation::Sum));
    CHECK(built.tensor(0, 0, 0) == 4.0);
}

TEST_CASE("events exactly at t_end fall outside the half-open window") {
    const std::vector<EventRecord> events = {{"a", "b", 10.0, 1.0}, {"a", "b", 9.999, 1.0}};
    const auto built = build_tensor(events, simple_cfg(0, 10, 2, Aggregation::Count));
    CHECK(built.tensor(0, 0, 1) == 1.0);
    double total = 0.0;
    for (double v : built.tensor.data()) total += v;
    CHECK(total == 1.0);
}

TEST_CASE("build_tensor matches a brute-force aggregation oracle") {
    std::mt19937_64 rng(23);
    const auto events = random_log(rng, 500);
    const auto cfg = simple_cfg(0, 100, 7, Aggregation::Sum);
    const auto built = build_tensor(events, cfg);

    const double width = (cfg.t_end - cfg.t_start) / static_cast<double>(cfg.k_bins);
    for (Index i = 0; i < built.tensor.rows(); ++i)
        for (Index j = 0; j < built.tensor.cols(); ++j)
            for (Index k = 0; k < built.tensor.depth(); ++k) {
                double expect = 0.0;
                for (const auto& e : events) {
                    if (e.source != built.sources.ids[static_cast<std::size_t>(i)]) continue;
                    if (e.target != built.targets.ids[static_cast<std::size_t>(j)]) continue;
                    if (e.timestamp < cfg.t_start || e.timestamp >= cfg.t_end) continue;
                    if (static_cast<Index>((e.timestamp - cfg.t_start) / width) != k) continue;
                    expect += e.value;
                }
                CHECK(built.tensor(i, j, k) == expect);
            }
}

TEST_CASE("mass conservation: tensor totals equal raw-log totals") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        const auto events = random_log(rng, 200);
        const auto cfg = simple_cfg(0, 100, 5, Aggregation::Sum);
        const auto built = build_tensor(events, cfg);
        double tensor_total = 0.0;
        for (double v : built.tensor.data()) tensor_total += v;
        double log_total = 0.0;
        for (const auto& e : events) {
            if (e.timestamp < cfg.t_start || e.timestamp >= cfg.t_end) continue;
            if (!built.sources.to_index.count(e.source)) continue;
            if (!built.targets.to_index.count(e.target)) continue;
            log_total += e.value;
        }
        CHECK(tensor_total == log_total);
    }
}

TEST_CASE("top_fraction keeps the most active entities, ties by id") {
    // s1 has 3 events, s2 has 2, s3 and s4 have 1 each
    std::vector<EventRecord> events;
    for (int n = 0; n < 3; ++n) events.push_back({"s1", "t", 1.0 + n, 1.0});
    for (int n = 0; n < 2; ++n) events.push_back({"s2", "t", 1.0 + n, 1.0});
    events.push_back({"s4", "t", 1.0, 1.0});
    events.push_back({"s3", "t", 2.0, 1.0});

    BinningConfig cfg = simple_cfg(0, 10, 1, Aggregation::Count);
    cfg.top_fraction = 1.0;
    CHECK(build_tensor(events, cfg).sources.ids.size() == 4);

    cfg.top_fraction = 0.75;  // ceil(3) = 3 kept: s1, s2, then s3 by id tie-break
    const auto built = build_tensor(events, cfg);
    REQUIRE(built.sources.ids.size() == 3);
    CHECK(std::set<std::string>(built.sources.ids.begin(), built.sources.ids.end()) ==
          std::set<std::string>({"s1", "s2", "s3"}));

    cfg.top_fraction = 0.25;
    CHECK(build_tensor(events, cfg).sources.ids == std::vector<std::string>({"s1"}));
}

TEST_CASE("index maps are dense and lexicographic") {
    const std::vector<EventRecord> events = {
        {"zeta", "m2", 1.0, 1.0}, {"alpha", "m1", 2.0, 1.0}, {"mu", "m3", 3.0, 1.0}};
    const auto built = build_tensor(events, simple_cfg(0, 10, 1, Aggregation::Count));
    CHECK(built.sources.ids == std::vector<std::string>({"alpha", "mu", "zeta"}));
    CHECK(built.sources.to_index.at("mu") == 1);
}

TEST_CASE("build_tensor error paths") {
    const std::vector<EventRecord> none;
    CHECK_THROWS_AS(build_tensor(none, simple_cfg(0, 10, 2, Aggregation::Count)), EmptyAfterFilter);

    const std::vector<EventRecord> outside = {{"a", "b", 42.0, 1.0}};
    CHECK_THROWS_AS(build_tensor(outside, simple_cfg(0, 10, 2, Aggregation::Count)), EmptyAfterFilter);

    const std::vector<EventRecord> negative = {{"a", "b", 1.0, -2.0}};
    CHECK_THROWS_AS(build_tensor(negative, simple_cfg(0, 10, 2, Aggregation::Sum)), NegativeValue);

    CHECK_THROWS_AS(build_tensor(none, simple_cfg(10, 0, 2, Aggregation::Count)), DimensionMismatch);
}

TEST_CASE("synth is deterministic per seed") {
    const auto r1 = synth_interactions(Scenario::Contracts, 7);
    const auto r2 = synth_interactions(Scenario::Contracts, 7);
    REQUIRE(r1.events.size() == r2.events.size());
    for (std::size_t n = 0; n < r1.events.size(); n += 997) {
        CHECK(r1.events[n].source == r2.events[n].source);
        CHECK(r1.events[n].timestamp == r2.events[n].timestamp);
        CHECK(r1.events[n].value == r2.events[n].value);
    }
    CHECK((r1.truth_da - r2.truth_da).cwiseAbs().maxCoeff() == 0.0);

    const auto r3 = synth_interactions(Scenario::Contracts, 8);
    bool differs = r1.events.size() != r3.events.size();
    for (std::size_t n = 0; !differs && n < r1.events.size(); ++n)
        differs = r1.events[n].value != r3.events[n].value;
    CHECK(differs);
}

TEST_CASE("contracts preset builds a 100x200x50 tensor") {
    const auto synth = synth_interactions(Scenario::Contracts, 3);
    const auto built = build_tensor(synth.events, synth.binning);
    CHECK(built.tensor.rows() == 100);
    CHECK(built.tensor.cols() == 200);
    CHECK(built.tensor.depth() == 50);
    CHECK(built.tensor.all_nonnegative());
}

TEST_CASE("vod preset builds a 100x125x25 tensor of counts") {
    const auto synth = synth_interactions(Scenario::Vod, 3);
    const auto built = build_tensor(synth.events, synth.binning);
    CHECK(built.tensor.rows() == 100);
    CHECK(built.tensor.cols() == 125);
    CHECK(built.tensor.depth() == 25);
    for (double v : built.tensor.data()) CHECK(v == std::floor(v));
}

TEST_CASE("noise-free contracts log has exact planted structure") {
    // each nonzero cell gets exactly one event valued by the planted bilinear
    // form, so the built tensor must reproduce the planted decomposition
    // entry for entry
    const auto synth = synth_interactions(Scenario::Contracts, 11, 0.0);
    const auto built = build_tensor(synth.events, synth.binning);

    Paratuck2Model planted;
    planted.a = synth.planted_a;
    planted.h = synth.planted_h;
    planted.b = synth.planted_b;
    for (Index k = 0; k < 50; ++k) {
        planted.da.push_back(synth.truth_da.col(k));
        planted.db.push_back(synth.truth_db.col(k));
    }
    double worst = 0.0;
    for (Index k = 0; k < 50; ++k) {
        const Matrix expect = reconstruct_slice(planted, k);
        worst = std::max(worst, (built.tensor.slice(k) - expect).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-12);
}
