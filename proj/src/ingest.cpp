#include "tcast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace tcast {

namespace {

std::vector<std::string> retained_ids(const std::map<std::string, Index>& counts, double top_fraction) {
    std::vector<std::pair<std::string, Index>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    const auto n_total = static_cast<double>(ranked.size());
    const auto n_keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(top_fraction * n_total - 1e-9)));
    std::vector<std::string> kept;
    kept.reserve(n_keep);
    for (std::size_t i = 0; i < n_keep && i < ranked.size(); ++i) kept.push_back(ranked[i].first);
    std::sort(kept.begin(), kept.end());
    return kept;
}

IndexMap make_index_map(std::vector<std::string> ids) {
    IndexMap m;
    m.ids = std::move(ids);
    m.to_index.reserve(m.ids.size());
    for (std::size_t i = 0; i < m.ids.size(); ++i)
        m.to_index.emplace(m.ids[i], static_cast<Index>(i));
    return m;
}

}  // namespace

BuiltTensor build_tensor(const std::vector<EventRecord>& events, const BinningConfig& cfg) {
    if (!(cfg.t_start < cfg.t_end)) throw DimensionMismatch("build_tensor: t_start must precede t_end");
    if (cfg.k_bins <= 0) throw DimensionMismatch("build_tensor: k_bins must be positive");
    if (!(cfg.top_fraction > 0.0 && cfg.top_fraction <= 1.0))
        throw DimensionMismatch("build_tensor: top_fraction must be in (0, 1]");

    std::vector<const EventRecord*> in_window;
    in_window.reserve(events.size());
    for (const auto& e : events) {
        if (e.timestamp < cfg.t_start || e.timestamp >= cfg.t_end) continue;
        if (e.value < 0.0)
            throw NegativeValue("build_tensor: negative event value from " + e.source);
        in_window.push_back(&e);
    }
    if (in_window.empty()) throw EmptyAfterFilter("build_tensor: no events inside the time window");

    std::map<std::string, Index> src_counts, tgt_counts;
    for (const auto* e : in_window) {
        ++src_counts[e->source];
        ++tgt_counts[e->target];
    }
    IndexMap sources = make_index_map(retained_ids(src_counts, cfg.top_fraction));
    IndexMap targets = make_index_map(retained_ids(tgt_counts, cfg.top_fraction));

    Tensor3 x(static_cast<Index>(sources.ids.size()), static_cast<Index>(targets.ids.size()),
              cfg.k_bins);
    const double width = (cfg.t_end - cfg.t_start) / static_cast<double>(cfg.k_bins);
    bool any = false;
    for (const auto* e : in_window) {
        const auto si = sources.to_index.find(e->source);
        const auto ti = targets.to_index.find(e->target);
        if (si == sources.to_index.end() || ti == targets.to_index.end()) continue;
        Index k = static_cast<Index>((e->timestamp - cfg.t_start) / width);
        if (k >= cfg.k_bins) k = cfg.k_bins - 1;
        x(si->second, ti->second, k) += cfg.aggregation == Aggregation::Count ? 1.0 : e->value;
        any = true;
    }
    if (!any) throw EmptyAfterFilter("build_tensor: no events left after activity filtering");
    return {std::move(x), std::move(sources), std::move(targets)};
}

namespace {

struct PlantedSignals {
    // signal(g, k) = max(0.05, base*(1 + amp*sin(2*pi*k/period + phase) + slope*k/bins))
    std::vector<double> base, amp, period, phase, slope;

    double at(std::size_t g, Index k, Index bins) const {
        const double t = static_cast<double>(k);
        const double v = base[g] * (1.0 + amp[g] * std::sin(2.0 * M_PI * t / period[g] + phase[g]) +
                                    slope[g] * t / static_cast<double>(bins));
        return std::max(0.05, v);
    }
};

PlantedSignals make_signals(std::size_t groups, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    PlantedSignals s;
    for (std::size_t g = 0; g < groups; ++g) {
        s.base.push_back(0.8 + 0.8 * u01(rng));     // 0.8 .. 1.6
        s.amp.push_back(0.3 + 0.2 * u01(rng));      // 0.3 .. 0.5
        s.period.push_back(6.0 + 6.0 * u01(rng));   // 6 .. 12 bins
        s.phase.push_back(2.0 * M_PI * u01(rng));
        s.slope.push_back(-0.15 + 0.3 * u01(rng));  // -0.15 .. 0.15 over the full range
    }
    return s;
}

std::string padded_id(const char* prefix, std::size_t n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, n);
    return buf;
}

}  // namespace

SynthResult synth_interactions(Scenario scenario, std::uint64_t seed, double noise_level) {
    const bool vod = scenario == Scenario::Vod;
    const std::size_t n_send = 100;
    const std::size_t n_recv = vod ? 125 : 200;
    const Index bins = vod ? 25 : 50;
    const std::size_t gp = 20;  // sender groups
    const std::size_t gq = 30;  // receiver groups
    const double bin_seconds = 86400.0;
    const double value_scale = vod ? 4.0 : 1.0;  // vod entries are watch counts

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // soft memberships: one dominant group per entity (round-robin, so group
    // sizes stay balanced) on top of a small dense baseline, so every pair
    // interacts and factors stay identifiable
    auto memberships = [&](std::size_t n, std::size_t groups) {
        Matrix m(static_cast<Index>(n), static_cast<Index>(groups));
        for (std::size_t e = 0; e < n; ++e) {
            for (std::size_t g = 0; g < groups; ++g)
                m(static_cast<Index>(e), static_cast<Index>(g)) = 0.02 + 0.03 * u01(rng);
            m(static_cast<Index>(e), static_cast<Index>(e % groups)) = 1.0 + 0.7 * u01(rng);
        }
        return m;
    };

    SynthResult out;
    out.planted_a = memberships(n_send, gp);
    out.planted_b = memberships(n_recv, gq);

    // asymmetry: dense weak background with a few strong links per row
    out.planted_h = Matrix(static_cast<Index>(gp), static_cast<Index>(gq));
    for (std::size_t p = 0; p < gp; ++p)
        for (std::size_t q = 0; q < gq; ++q)
            out.planted_h(static_cast<Index>(p), static_cast<Index>(q)) = 0.05 + 0.1 * u01(rng);
    for (std::size_t p = 0; p < gp; ++p)
        for (int l = 0; l < 3; ++l) {
            const auto q = static_cast<std::size_t>(u01(rng) * gq) % gq;
            out.planted_h(static_cast<Index>(p), static_cast<Index>(q)) = 0.8 + 0.7 * u01(rng);
        }
    for (std::size_t q = 0; q < gq; ++q) {
        if (out.planted_h.col(static_cast<Index>(q)).maxCoeff() >= 0.8) continue;
        const auto p = static_cast<std::size_t>(u01(rng) * gp) % gp;
        out.planted_h(static_cast<Index>(p), static_cast<Index>(q)) = 0.8 + 0.7 * u01(rng);
    }
    out.planted_h *= value_scale;

    const PlantedSignals sig_a = make_signals(gp, rng);
    const PlantedSignals sig_b = make_signals(gq, rng);
    out.truth_da = Matrix(static_cast<Index>(gp), bins);
    out.truth_db = Matrix(static_cast<Index>(gq), bins);
    for (std::size_t g = 0; g < gp; ++g)
        for (Index k = 0; k < bins; ++k)
            out.truth_da(static_cast<Index>(g), k) = sig_a.at(g, k, bins);
    for (std::size_t g = 0; g < gq; ++g)
        for (Index k = 0; k < bins; ++k)
            out.truth_db(static_cast<Index>(g), k) = sig_b.at(g, k, bins);

    const char* sp = vod ? "u" : "s";
    const char* tp = vod ? "m" : "r";
    std::vector<std::string> send_ids, recv_ids;
    for (std::size_t i = 0; i < n_send; ++i) send_ids.push_back(padded_id(sp, i));
    for (std::size_t j = 0; j < n_recv; ++j) recv_ids.push_back(padded_id(tp, j));
    for (Index k = 0; k < bins; ++k) {
        const double bin_t0 = static_cast<double>(k) * bin_seconds;
        const Matrix intensity = out.planted_a * out.truth_da.col(k).asDiagonal() * out.planted_h *
                                 out.truth_db.col(k).asDiagonal() * out.planted_b.transpose();
        for (std::size_t i = 0; i < n_send; ++i) {
            for (std::size_t j = 0; j < n_recv; ++j) {
                const double lambda = intensity(static_cast<Index>(i), static_cast<Index>(j));
                const double noisy = lambda * (1.0 + noise_level * (2.0 * u01(rng) - 1.0));
                if (vod) {
                    const auto count = static_cast<long>(std::lround(noisy));
                    for (long r = 0; r < count; ++r) {
                        const double ts = bin_t0 + bin_seconds * (static_cast<double>(r) + 0.5) /
                                                       (static_cast<double>(count) + 1.0);
                        out.events.push_back({send_ids[i], recv_ids[j], ts, 1.0});
                    }
                } else {
                    if (noisy <= 0.0) continue;
                    const double ts = bin_t0 + bin_seconds * (0.05 + 0.9 * u01(rng));
                    out.events.push_back({send_ids[i], recv_ids[j], ts, noisy});
                }
            }
        }
    }

    out.binning.t_start = 0.0;
    out.binning.t_end = static_cast<double>(bins) * bin_seconds;
    out.binning.k_bins = bins;
    out.binning.aggregation = vod ? Aggregation::Count : Aggregation::Sum;
    out.binning.top_fraction = 1.0;
    return out;
}

}  // namespace tcast
