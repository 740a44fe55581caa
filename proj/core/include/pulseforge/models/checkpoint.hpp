#pragma once

#include <map>
#include <string>

#include "pulseforge/models/train.hpp"

namespace pulseforge::models {

// Everything a finished training run needs to be reused: the model, its
// training configuration, the held-out split, and summary metrics.
struct Checkpoint {
  ModelParams model;
  TrainConfig config;
  std::vector<std::uint32_t> train_indices;
  std::vector<std::uint32_t> val_indices;
  std::map<std::string, double> metrics;
  std::string dataset_path;  // provenance; may be empty
};

// File layout: magic "PFWM", u32 version, u64 header length, JSON header
// (arch, kind, train config, split, metrics, tensor directory), then a raw
// little-endian f32 blob in directory order. Parameters are stored in f32;
// calling snap_to_f32() (train() does) makes save/load round-trips bit-exact.
void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace pulseforge::models
