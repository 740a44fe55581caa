#include "pulseforge/pulsegen/dataset.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "pulseforge/pulsegen/fiber.hpp"
#include "pulseforge/pulsegen/preprocess.hpp"
#include "pulseforge/pulsegen/sampling.hpp"
#include "pulseforge/pulsegen/synthesis.hpp"
#include "pulseforge/util/parallel.hpp"
#include "pulseforge/util/text.hpp"

static_assert(std::endian::native == std::endian::little,
              "profiles.f32le writer assumes a little-endian host");

namespace pulseforge::pulsegen {

namespace {

using nlohmann::json;

json spec_to_json(const PulseSpec& s) {
  return json{{"envelope", envelope_name(s.envelope)},
              {"order", s.order},
              {"sigma_t_ps", s.sigma_t * 1e12},
              {"phi2_s2", s.phi2},
              {"phi3_s3", s.phi3},
              {"phi4_s4", s.phi4},
              {"lambda0_m", s.lambda0},
              {"seed", s.seed}};
}

PulseSpec spec_from_json(const json& j) {
  PulseSpec s;
  s.envelope = envelope_from_name(j.at("envelope").get<std::string>());
  s.order = j.at("order").get<int>();
  s.sigma_t = j.at("sigma_t_ps").get<double>() * 1e-12;
  s.phi2 = j.at("phi2_s2").get<double>();
  s.phi3 = j.at("phi3_s3").get<double>();
  s.phi4 = j.at("phi4_s4").get<double>();
  s.lambda0 = j.at("lambda0_m").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

struct PairResult {
  PulseSpec spec;
  std::uint32_t attempts = 1;
  IntensityProfile input, propagated;
};

PairResult make_pair(std::uint64_t master_seed, std::uint64_t pair_index,
                     const FiberProxyParams& fiber, const FrequencyGrid& grid,
                     const TimeGrid& out_grid) {
  for (std::uint32_t attempt = 0; attempt < 8; ++attempt) {
    PulseSpec spec = sample_pulse_spec(master_seed, pair_index, attempt);
    try {
      SpectralField field = synthesize_field(spec, grid);
      TimeGrid tgrid = synthesis_time_grid(grid);
      PairResult r;
      r.spec = spec;
      r.attempts = attempt + 1;
      r.input = preprocess(to_intensity(field), tgrid, out_grid, ProfileTag::Input);
      SpectralField prop = propagate_splitstep(field, fiber);
      r.propagated = preprocess(to_intensity(prop), tgrid, out_grid, ProfileTag::Propagated);
      return r;
    } catch (const DegeneratePulseError& e) {
      std::fprintf(stderr, "[pulsegen] pair %llu attempt %u degenerate (%s), resampling\n",
                   static_cast<unsigned long long>(pair_index), attempt + 1, e.what());
    }
  }
  throw Error("generate_dataset: pair " + std::to_string(pair_index) +
              " degenerate after 8 attempts");
}

}  // namespace

DatasetManifest generate_dataset(std::uint64_t count_pairs, std::uint64_t master_seed,
                                 const FiberProxyParams& fiber, const std::string& out_dir) {
  if (count_pairs < 1) throw InvalidInputError("generate_dataset: count_pairs must be >= 1");
  fiber.validate();
  const FrequencyGrid grid;
  const TimeGrid out_grid = standard_output_grid();

  std::vector<PairResult> results(count_pairs);
  std::vector<std::exception_ptr> errors(count_pairs);
  util::parallel_for(static_cast<int>(count_pairs), [&](int i) {
    try {
      results[i] = make_pair(master_seed, i, fiber, grid, out_grid);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  DatasetManifest manifest;
  manifest.count_pairs = count_pairs;
  manifest.master_seed = master_seed;
  manifest.fiber = fiber;
  manifest.grid = out_grid;

  util::ensure_directory(out_dir);
  std::ofstream blob(out_dir + "/profiles.f32le", std::ios::binary | std::ios::trunc);
  if (!blob) throw IoError("cannot write " + out_dir + "/profiles.f32le");

  const std::size_t row_bytes = sizeof(float) * out_grid.n_points;
  std::vector<float> row(out_grid.n_points);
  auto append = [&](const IntensityProfile& p, const PairResult& r, std::uint64_t pair) {
    DatasetRecord rec;
    rec.index = manifest.records.size();
    rec.pair = pair;
    rec.role = p.tag;
    rec.spec = r.spec;
    rec.attempts = r.attempts;
    rec.energy = pulse_energy(p);
    rec.offset_bytes = rec.index * row_bytes;
    manifest.records.push_back(rec);
    for (int k = 0; k < out_grid.n_points; ++k) row[k] = static_cast<float>(p.values[k]);
    blob.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row_bytes));
  };
  for (std::uint64_t i = 0; i < count_pairs; ++i) {
    append(results[i].input, results[i], i);
    append(results[i].propagated, results[i], i);
  }
  blob.close();
  if (!blob) throw IoError("write failure: " + out_dir + "/profiles.f32le");

  json j;
  j["format"] = "pulseforge-dataset";
  j["version"] = 1;
  j["count_pairs"] = count_pairs;
  j["master_seed"] = master_seed;
  j["fiber"] = {{"beta2", fiber.beta2},
                {"gamma_nl", fiber.gamma_nl},
                {"length", fiber.length},
                {"n_steps", fiber.n_steps}};
  j["grid"] = {{"n_points", out_grid.n_points},
               {"delta_t", out_grid.delta_t},
               {"t_min", out_grid.t_min}};
  j["profiles_file"] = "profiles.f32le";
  json recs = json::array();
  for (const auto& r : manifest.records) {
    recs.push_back(json{{"index", r.index},
                        {"pair", r.pair},
                        {"role", r.role == ProfileTag::Input ? "input" : "propagated"},
                        {"spec", spec_to_json(r.spec)},
                        {"attempts", r.attempts},
                        {"energy_s", r.energy},
                        {"offset_bytes", r.offset_bytes}});
  }
  j["records"] = std::move(recs);
  util::write_file(out_dir + "/manifest.json", j.dump(2) + "\n");
  return manifest;
}

DatasetManifest read_manifest(const std::string& dir) {
  json j;
  try {
    j = json::parse(util::read_file(dir + "/manifest.json"));
  } catch (const json::exception& e) {
    throw ArtifactError("manifest.json parse error in " + dir + ": " + e.what());
  }
  if (j.value("format", "") != "pulseforge-dataset")
    throw ArtifactError("not a pulseforge dataset: " + dir);
  if (j.value("version", 0) != 1) throw ArtifactError("unsupported dataset version in " + dir);

  DatasetManifest m;
  try {
    m.count_pairs = j.at("count_pairs").get<std::uint64_t>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.fiber.beta2 = j.at("fiber").at("beta2").get<double>();
    m.fiber.gamma_nl = j.at("fiber").at("gamma_nl").get<double>();
    m.fiber.length = j.at("fiber").at("length").get<double>();
    m.fiber.n_steps = j.at("fiber").at("n_steps").get<int>();
    m.grid.n_points = j.at("grid").at("n_points").get<int>();
    m.grid.delta_t = j.at("grid").at("delta_t").get<double>();
    m.grid.t_min = j.at("grid").at("t_min").get<double>();
    for (const auto& rj : j.at("records")) {
      DatasetRecord r;
      r.index = rj.at("index").get<std::uint64_t>();
      r.pair = rj.at("pair").get<std::uint64_t>();
      r.role = rj.at("role").get<std::string>() == "input" ? ProfileTag::Input
                                                           : ProfileTag::Propagated;
      r.spec = spec_from_json(rj.at("spec"));
      r.attempts = rj.at("attempts").get<std::uint32_t>();
      r.energy = rj.at("energy_s").get<double>();
      r.offset_bytes = rj.at("offset_bytes").get<std::uint64_t>();
      m.records.push_back(r);
    }
  } catch (const json::exception& e) {
    throw ArtifactError("malformed manifest in " + dir + ": " + e.what());
  }
  return m;
}

Dataset load_dataset(const std::string& dir) {
  Dataset ds;
  ds.manifest = read_manifest(dir);
  const int n = ds.manifest.grid.n_points;
  const std::size_t count = ds.manifest.records.size();

  std::ifstream blob(dir + "/profiles.f32le", std::ios::binary);
  if (!blob) throw IoError("cannot open " + dir + "/profiles.f32le");
  std::vector<float> buf(count * n);
  blob.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (blob.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
    throw ArtifactError("profiles.f32le shorter than manifest declares in " + dir);
  blob.peek();
  if (!blob.eof()) throw ArtifactError("profiles.f32le longer than manifest declares in " + dir);

  ds.profiles.assign(buf.begin(), buf.end());
  return ds;
}

}  // namespace pulseforge::pulsegen
