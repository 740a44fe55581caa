#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulseforge/pulsegen/types.hpp"

namespace pulseforge::pulsegen {

struct DatasetRecord {
  std::uint64_t index = 0;  // record index = row in profiles.f32le
  std::uint64_t pair = 0;
  ProfileTag role = ProfileTag::Input;
  PulseSpec spec;
  std::uint32_t attempts = 1;  // sampling attempts consumed (>1 after resampling)
  double energy = 0.0;         // seconds (unit-peak profile integral)
  std::uint64_t offset_bytes = 0;
};

struct DatasetManifest {
  std::uint64_t count_pairs = 0;
  std::uint64_t master_seed = 0;
  FiberProxyParams fiber;
  TimeGrid grid;
  std::vector<DatasetRecord> records;
};

// In-memory dataset: profiles stored row-major, 512 samples per record.
struct Dataset {
  DatasetManifest manifest;
  std::vector<double> profiles;  // records.size() x grid.n_points

  std::size_t size() const { return manifest.records.size(); }
  const double* row(std::size_t r) const { return profiles.data() + r * manifest.grid.n_points; }
};

// Synthesizes count_pairs (input, propagated) profile pairs deterministically
// from master_seed and writes `manifest.json` + `profiles.f32le` (raw
// little-endian f32, 512 per record, manifest order) into out_dir.
// Degenerate draws are resampled with an incremented attempt stream and
// logged to stderr; generation fails rather than dropping a record.
DatasetManifest generate_dataset(std::uint64_t count_pairs, std::uint64_t master_seed,
                                 const FiberProxyParams& fiber, const std::string& out_dir);

DatasetManifest read_manifest(const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace pulseforge::pulsegen
