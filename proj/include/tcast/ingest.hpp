#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcast/tensor.hpp"

namespace tcast {

/// One row of an interaction log: who acted on whom, when, and with what
/// weight (1.0 for count-type events, an amount for value transfers).
struct EventRecord {
    std::string source;
    std::string target;
    double timestamp = 0.0;  // seconds since epoch
    double value = 0.0;
};

enum class Aggregation { Count, Sum };

struct BinningConfig {
    double t_start = 0.0;
    double t_end = 0.0;
    Index k_bins = 1;
    Aggregation aggregation = Aggregation::Count;
    double top_fraction = 1.0;  // fraction of most-active entities to retain
};

/// Dense index assignment for retained entity ids, ordered lexicographically.
struct IndexMap {
    std::vector<std::string> ids;  // index -> id
    std::unordered_map<std::string, Index> to_index;
};

struct BuiltTensor {
    Tensor3 tensor;
    IndexMap sources;
    IndexMap targets;
};

/// Aggregates in-window events into a sources x targets x bins tensor.
/// Entities are ranked by in-window event count (ties broken by id) and the
/// bottom (1 - top_fraction) dropped; bins partition [t_start, t_end)
/// half-open and equal-width.
BuiltTensor build_tensor(const std::vector<EventRecord>& events, const BinningConfig& cfg);

enum class Scenario { Vod, Contracts };

struct SynthResult {
    std::vector<EventRecord> events;
    Matrix truth_da;   // planted sender-group signals, groups x bins
    Matrix truth_db;   // planted receiver-group signals, groups x bins
    Matrix planted_a;  // sender memberships, senders x groups (one entry per row)
    Matrix planted_h;  // group link weights, sender groups x receiver groups
    Matrix planted_b;  // receiver memberships, receivers x groups
    BinningConfig binning;
};

/// Generates an event log with planted group structure: every sender and
/// receiver belongs to one latent group, group activity follows smooth
/// periodic-plus-trend signals, and pair intensities are the bilinear mix
/// of the group signals. noise_level is the relative amplitude of the
/// multiplicative noise on event values (0 gives exactly structured data).
///   Vod:       100 x 125 entities, 25 bins, count aggregation
///   Contracts: 100 x 200 entities, 50 bins, sum aggregation
SynthResult synth_interactions(Scenario scenario, std::uint64_t seed, double noise_level = 0.1);

}  // namespace tcast
