#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tcast/ingest.hpp"
#include "tcast/lstm.hpp"
#include "tcast/metrics.hpp"
#include "tcast/paratuck2.hpp"
#include "tcast/pipeline.hpp"

namespace tcast {

// All writers format doubles with 17 significant digits, so files are
// byte-stable across runs and values round-trip exactly.

void write_events(const std::filesystem::path& path, const std::vector<EventRecord>& events,
                  char delimiter = ',');
std::vector<EventRecord> read_events(const std::filesystem::path& path, char delimiter = ',');

void write_tensor(const std::filesystem::path& path, const Tensor3& x);
Tensor3 read_tensor(const std::filesystem::path& path);

void write_model(const std::filesystem::path& path, const Paratuck2Model& m);
Paratuck2Model read_model(const std::filesystem::path& path);

void write_lstm(const std::filesystem::path& path, const LstmParams& p);
LstmParams read_lstm(const std::filesystem::path& path);

/// Latent-series table: one row per factor, a '|' marker column separating
/// the history columns from the forecast columns.
struct SeriesFile {
    Matrix values;       // L x (history + forecast)
    Index history = 0;   // column count before the marker
    std::string side;    // "A" or "B"
};

void write_series(const std::filesystem::path& path, const Matrix& values, Index history,
                  const std::string& side);
SeriesFile read_series(const std::filesystem::path& path);

void write_index_map(const std::filesystem::path& path, const IndexMap& m);

/// Score table mirroring the per-factor / average layout; either side may be
/// absent.
void write_scores(const std::filesystem::path& path, const std::optional<LatentScores>& side_a,
                  const std::optional<LatentScores>& side_b);

void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

/// 17-significant-digit representation used by every writer.
std::string format_double(double v);

}  // namespace tcast
