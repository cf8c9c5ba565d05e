#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

namespace ustlab {

/// Philox4x32-10 block function (Salmon et al., SC'11). Counter-based: the
/// output depends only on (counter, key), which is what makes stream
/// splitting by task index reproducible.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Splittable counter-based random stream.
///
/// A stream is identified by (seed, stream id). The seed forms the Philox key;
/// the stream id occupies the upper half of the counter and a block index the
/// lower half, so distinct streams never share a counter value. `split(i)`
/// derives the child id from the parent id and i with a SplitMix64 mix, so
/// the child sequence is a pure function of (seed, path of split indices).
///
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  RandomStream split(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }
  /// Unbiased uniform integer in [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Geometric on {1, 2, ...} with success probability p in (0, 1].
  std::uint64_t geometric(double p);
  double exponential();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Default worker count: hardware concurrency, at least one.
unsigned default_thread_count();

/// Runs `task(i, stream_i)` for i in [0, n) on up to `threads` workers, where
/// stream_i = base.split(i). Results are returned ordered by task index, so
/// the output does not depend on the thread count or scheduling order.
template <typename Result>
std::vector<Result> run_replicates(std::size_t n, const RandomStream& base, unsigned threads,
                                   const std::function<Result(std::size_t, RandomStream&)>& task) {
  std::vector<Result> out(n);
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  auto work = [&](unsigned worker) {
    // Fixed strided assignment: task i always runs with base.split(i).
    for (std::size_t i = worker; i < n; i += threads) {
      RandomStream rng = base.split(i);
      out[i] = task(i, rng);
    }
  };
  if (threads <= 1) {
    work(0);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace ustlab
