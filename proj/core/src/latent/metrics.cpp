#include "pulseforge/latent/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "pulseforge/util/rng.hpp"

namespace pulseforge::latent {

double snr_db(const Tensor& originals, const Tensor& reconstructions) {
  check_same_shape(originals, reconstructions, "snr_db");
  if (originals.rank() != 2) throw ShapeError("snr_db: expected [n, len]");
  const int n = originals.dim(0), len = originals.dim(1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double sig = 0.0, err = 0.0;
    for (int k = 0; k < len; ++k) {
      double x = originals[static_cast<std::size_t>(i) * len + k];
      double e = x - reconstructions[static_cast<std::size_t>(i) * len + k];
      sig += x * x;
      err += e * e;
    }
    if (!(sig > 0.0)) throw InvalidInputError("snr_db: zero-norm original sample");
    double db = err > 0.0 ? 10.0 * std::log10(sig / err) : 300.0;
    if (db > 300.0 || err == 0.0) {
      if (err == 0.0)
        std::fprintf(stderr, "[metrics] exact reconstruction of sample %d, capping at 300 dB\n",
                     i);
      db = std::min(db, 300.0);
    }
    acc += db;
  }
  return acc / n;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidInputError("pearson: bad input lengths");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cab = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    cab += da * db;
    va += da * da;
    vb += db * db;
  }
  if (!(va > 0.0) || !(vb > 0.0))
    throw InvalidInputError("pearson: zero variance input");
  return cab / std::sqrt(va * vb);
}

namespace {

std::vector<double> pairwise_distances(const Tensor& rows, const std::vector<int>& idx) {
  const int len = rows.dim(1);
  std::vector<double> out;
  out.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      const double* a = rows.v.data() + static_cast<std::size_t>(idx[i]) * len;
      const double* b = rows.v.data() + static_cast<std::size_t>(idx[j]) * len;
      double s = 0.0;
      for (int k = 0; k < len; ++k) {
        double d = a[k] - b[k];
        s += d * d;
      }
      out.push_back(std::sqrt(s));
    }
  return out;
}

}  // namespace

double distance_correlation(const Tensor& profiles, const Tensor& codes, int n_batches,
                            int batch_size, std::uint64_t seed, std::vector<double>* per_batch) {
  if (profiles.rank() != 2 || codes.rank() != 2 || profiles.dim(0) != codes.dim(0))
    throw ShapeError("distance_correlation: profiles/codes row mismatch");
  const int n = profiles.dim(0);
  if (batch_size < 3) throw InvalidInputError("distance_correlation: batch_size must be >= 3");
  const int b = std::min(batch_size, n);

  double acc = 0.0;
  int used = 0;
  for (int batch = 0; batch < n_batches; ++batch) {
    util::Rng rng(util::derive_seed(seed, batch, 0xc02));
    // sample without replacement inside the batch
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> idx(b);
    for (int i = 0; i < b; ++i) {
      std::size_t pick = rng.uniform_index(n - i);
      idx[i] = pool[pick];
      std::swap(pool[pick], pool[n - 1 - i]);
    }
    std::vector<double> dx = pairwise_distances(profiles, idx);
    std::vector<double> dz = pairwise_distances(codes, idx);
    try {
      double r = pearson(dx, dz);
      acc += r;
      if (per_batch) per_batch->push_back(r);
      ++used;
    } catch (const InvalidInputError&) {
      std::fprintf(stderr, "[metrics] batch %d has zero distance variance, skipped\n", batch);
    }
  }
  if (used == 0) throw InvalidInputError("distance_correlation: every batch degenerate");
  return acc / used;
}

std::vector<double> energy_correlation(const Tensor& coords, const std::vector<double>& energies) {
  if (coords.rank() != 2 || coords.dim(0) != static_cast<int>(energies.size()))
    throw ShapeError("energy_correlation: coords/energies length mismatch");
  const int n = coords.dim(0), k = coords.dim(1);
  std::vector<double> out(k);
  std::vector<double> col(n);
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < n; ++i) col[i] = coords[static_cast<std::size_t>(i) * k + c];
    out[c] = pearson(col, energies);  // throws on zero variance
  }
  return out;
}

}  // namespace pulseforge::latent
