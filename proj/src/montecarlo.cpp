#include "cogmac/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "cogmac/scenario.hpp"

namespace cogmac {
namespace {

struct BlockStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t hits = 0;
};

// Runs `accumulate(sample, stats)` over n samples split into fixed blocks,
// fanned out over worker threads, and returns per-block results in block
// order.
template <typename Accumulate>
std::vector<BlockStats> run_blocks(const Scenario& s, std::uint64_t n,
                                   std::uint64_t seed,
                                   const Accumulate& accumulate) {
  const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<BlockStats> out(blocks);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    GainSample sample;
    for (std::uint64_t b = next.fetch_add(1); b < blocks;
         b = next.fetch_add(1)) {
      RandomStream stream(seed, b);
      const std::uint64_t begin = b * kBlockSize;
      const std::uint64_t end = std::min(n, begin + kBlockSize);
      BlockStats st;
      for (std::uint64_t i = begin; i < end; ++i) {
        sample_gains(s, stream, sample);
        accumulate(sample, st);
      }
      out[b] = st;
    }
  };

  const auto workers = static_cast<unsigned>(
      std::min<std::uint64_t>(worker_count(), std::max<std::uint64_t>(blocks, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  return out;
}

BlockStats reduce(const std::vector<BlockStats>& blocks) {
  BlockStats total;
  for (const auto& b : blocks) {
    total.sum += b.sum;
    total.sum_sq += b.sum_sq;
    total.hits += b.hits;
  }
  return total;
}

EstimateWithCI summarize(double sum, double sum_sq, std::uint64_t count,
                         std::uint64_t n, std::uint64_t seed) {
  EstimateWithCI e;
  e.n = n;
  e.seed = seed;
  const double c = static_cast<double>(count);
  e.mean = sum / c;
  if (count > 1) {
    const double var = std::max(0.0, (sum_sq - sum * e.mean) / (c - 1.0));
    e.std_error = std::sqrt(var / c);
  }
  return e;
}

void require_samples(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("sample count must be >= 1");
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32)};
  engine_.seed(seq);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double mean) {
  // 1 - u lies in (0, 1], so the log is finite.
  return -mean * std::log(1.0 - uniform());
}

void sample_gains(const Scenario& s, RandomStream& stream, GainSample& out) {
  const std::size_t k = s.users.size();
  out.gk_sq.resize(k);
  out.hk_sq.resize(k);
  out.gp_sq = stream.exponential(s.primary.var_gp);
  for (std::size_t i = 0; i < k; ++i) {
    out.gk_sq[i] = stream.exponential(s.users[i].var_g);
  }
  out.hp_sq = stream.exponential(s.primary.var_hp);
  for (std::size_t i = 0; i < k; ++i) {
    out.hk_sq[i] = stream.exponential(s.users[i].var_h);
  }
}

GainSample sample_gains(const Scenario& s, RandomStream& stream) {
  GainSample g;
  sample_gains(s, stream, g);
  return g;
}

unsigned worker_count() {
  if (const char* env = std::getenv("COGMAC_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

EstimateWithCI estimate_outage(std::span<const double> powers,
                               const Scenario& s, std::uint64_t n,
                               std::uint64_t seed) {
  require_samples(n);
  const double rp = s.primary.rate_rp;
  const auto blocks = run_blocks(s, n, seed, [&](const GainSample& g,
                                                 BlockStats& st) {
    if (primary_rate(g, powers, s) < rp) ++st.hits;
  });
  EstimateWithCI e;
  e.n = n;
  e.seed = seed;
  const double p = static_cast<double>(reduce(blocks).hits) /
                   static_cast<double>(n);
  e.mean = p;
  e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return e;
}

EstimateWithCI estimate_ergodic_rate(std::span<const double> powers,
                                     const Scenario& s, std::uint64_t n,
                                     std::uint64_t seed,
                                     std::optional<OicRegime> filter,
                                     FilterConvention convention) {
  require_samples(n);
  const auto blocks = run_blocks(s, n, seed, [&](const GainSample& g,
                                                 BlockStats& st) {
    const double gamma_p = primary_snr_at_secondary(g, s);
    const double psi = secondary_snr(g, powers, s);
    const double r = sum_rate_oic(gamma_p, psi, s.primary.rate_rp);
    if (filter &&
        classify_regime(gamma_p, psi, s.primary.rate_rp) != *filter) {
      return;
    }
    st.sum += r;
    st.sum_sq += r * r;
    ++st.hits;
  });
  const BlockStats total = reduce(blocks);
  if (!filter) return summarize(total.sum, total.sum_sq, n, n, seed);

  if (total.hits == 0) {
    throw EmptyEventError("no sample fell in the " +
                          std::string(to_string(*filter)) + " regime");
  }
  const std::uint64_t count =
      convention == FilterConvention::Conditional ? total.hits : n;
  EstimateWithCI e = summarize(total.sum, total.sum_sq, count, n, seed);
  e.conditioning = Conditioning{
      *filter, static_cast<double>(total.hits) / static_cast<double>(n)};
  return e;
}

EstimateWithCI estimate_mean(
    const Scenario& s, std::uint64_t n, std::uint64_t seed,
    const std::function<double(const GainSample&)>& statistic) {
  require_samples(n);
  const auto blocks = run_blocks(s, n, seed, [&](const GainSample& g,
                                                 BlockStats& st) {
    const double v = statistic(g);
    st.sum += v;
    st.sum_sq += v * v;
  });
  const BlockStats total = reduce(blocks);
  return summarize(total.sum, total.sum_sq, n, n, seed);
}

std::array<double, 3> regime_frequencies(std::span<const double> powers,
                                         const Scenario& s, std::uint64_t n,
                                         std::uint64_t seed) {
  std::array<double, 3> freq{};
  for (std::size_t r = 0; r < 3; ++r) {
    const auto regime = static_cast<OicRegime>(r);
    const auto blocks = run_blocks(s, n, seed, [&](const GainSample& g,
                                                   BlockStats& st) {
      if (classify_regime(g, powers, s) == regime) ++st.hits;
    });
    freq[r] = static_cast<double>(reduce(blocks).hits) /
              static_cast<double>(n);
  }
  return freq;
}

}  // namespace cogmac
