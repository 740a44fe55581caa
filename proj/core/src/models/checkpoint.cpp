#include "pulseforge/models/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "pulseforge/util/text.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace pulseforge::models {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'P', 'F', 'W', 'M'};
constexpr std::uint32_t kVersion = 1;

json arch_to_json(const ArchConfig& a) {
  return json{{"input_len", a.input_len},   {"latent_dim", a.latent_dim},
              {"channels", a.channels},     {"kernels", a.kernels},
              {"strides", a.strides},       {"use_residual", a.use_residual}};
}

ArchConfig arch_from_json(const json& j) {
  ArchConfig a;
  a.input_len = j.at("input_len").get<int>();
  a.latent_dim = j.at("latent_dim").get<int>();
  a.channels = j.at("channels").get<std::vector<int>>();
  a.kernels = j.at("kernels").get<std::vector<int>>();
  a.strides = j.at("strides").get<std::vector<int>>();
  a.use_residual = j.at("use_residual").get<bool>();
  return a;
}

json config_to_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"lr", c.lr},
              {"lambda", c.lambda},
              {"beta", c.beta},
              {"imq_scale_factors", c.imq_scale_factors},
              {"split_ratio", c.split_ratio},
              {"seed", c.seed}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.lr = j.at("lr").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.beta = j.at("beta").get<double>();
  c.imq_scale_factors = j.at("imq_scale_factors").get<std::vector<double>>();
  c.split_ratio = j.at("split_ratio").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
  json dir = json::array();
  std::uint64_t offset = 0;
  auto add_entry = [&](const NamedTensor& nt, const char* kind) {
    dir.push_back(json{{"name", nt.name}, {"kind", kind}, {"shape", nt.t.shape},
                       {"offset", offset}});
    offset += nt.t.size() * sizeof(float);
  };
  for (const auto& p : cp.model.params) add_entry(p, "param");
  for (const auto& b : cp.model.buffers) add_entry(b, "buffer");

  json header;
  header["kind"] = model_kind_name(cp.model.kind);
  header["beta"] = cp.model.beta;
  header["arch"] = arch_to_json(cp.model.arch);
  header["train"] = config_to_json(cp.config);
  header["train_indices"] = cp.train_indices;
  header["val_indices"] = cp.val_indices;
  header["metrics"] = cp.metrics;
  header["dataset_path"] = cp.dataset_path;
  header["tensors"] = std::move(dir);
  header["blob_bytes"] = offset;
  std::string hs = header.dump();

  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) util::ensure_directory(parent.string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write(kMagic, 4);
  std::uint32_t ver = kVersion;
  std::uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&ver), sizeof(ver));
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));

  std::vector<float> buf;
  auto write_blob = [&](const NamedTensor& nt) {
    buf.resize(nt.t.size());
    for (std::size_t i = 0; i < nt.t.size(); ++i) buf[i] = static_cast<float>(nt.t[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  };
  for (const auto& p : cp.model.params) write_blob(p);
  for (const auto& b : cp.model.buffers) write_blob(b);
  out.close();
  if (!out) throw IoError("write failure: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);

  char magic[4];
  std::uint32_t ver = 0;
  std::uint64_t hlen = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&ver), sizeof(ver));
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ArtifactError("not a pulseforge checkpoint: " + path);
  if (ver != kVersion)
    throw ArtifactError("unsupported checkpoint version " + std::to_string(ver) + ": " + path);

  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw ArtifactError("truncated checkpoint header: " + path);

  json header;
  try {
    header = json::parse(hs);
  } catch (const json::exception& e) {
    throw ArtifactError("corrupt checkpoint header: " + std::string(e.what()));
  }

  Checkpoint cp;
  try {
    cp.model.kind = model_kind_from_name(header.at("kind").get<std::string>());
    cp.model.beta = header.at("beta").get<double>();
    cp.model.arch = arch_from_json(header.at("arch"));
    cp.config = config_from_json(header.at("train"));
    cp.train_indices = header.at("train_indices").get<std::vector<std::uint32_t>>();
    cp.val_indices = header.at("val_indices").get<std::vector<std::uint32_t>>();
    cp.metrics = header.at("metrics").get<std::map<std::string, double>>();
    cp.dataset_path = header.value("dataset_path", "");

    std::uint64_t blob_bytes = header.at("blob_bytes").get<std::uint64_t>();
    std::vector<char> blob(blob_bytes);
    in.read(blob.data(), static_cast<std::streamsize>(blob_bytes));
    if (in.gcount() != static_cast<std::streamsize>(blob_bytes))
      throw ArtifactError("truncated checkpoint blob: " + path);

    for (const auto& tj : header.at("tensors")) {
      NamedTensor nt;
      nt.name = tj.at("name").get<std::string>();
      auto shape = tj.at("shape").get<std::vector<int>>();
      std::uint64_t off = tj.at("offset").get<std::uint64_t>();
      nt.t = diffcore::Tensor(shape);
      if (off + nt.t.size() * sizeof(float) > blob_bytes)
        throw ArtifactError("tensor extends past checkpoint blob: " + nt.name);
      const float* src = reinterpret_cast<const float*>(blob.data() + off);
      for (std::size_t i = 0; i < nt.t.size(); ++i) nt.t[i] = static_cast<double>(src[i]);
      if (tj.at("kind").get<std::string>() == "param")
        cp.model.params.push_back(std::move(nt));
      else
        cp.model.buffers.push_back(std::move(nt));
    }
  } catch (const json::exception& e) {
    throw ArtifactError("malformed checkpoint header: " + std::string(e.what()));
  }
  return cp;
}

}  // namespace pulseforge::models
