#pragma once

// Counter-based random number generation.
//
// Every random quantity in this project is drawn from an explicitly named
// stream: a (master seed, stream id) pair.  Stream ids are derived by a
// splittable child() operation, so replica j of an experiment always sees
// the same bits regardless of scheduling, thread count, or how many draws
// other replicas consumed.  The block generator is Philox4x32-10
// (Salmon, Moraes, Dror, Shaw, "Parallel random numbers: as easy as
// 1, 2, 3", SC'11); it is stateless per block, which is what makes the
// per-index stream derivation cheap.

#include <cstdint>
#include <cmath>
#include <string_view>

namespace rwre {

namespace detail {

// Finalizer from the splitmix64 generator (Vigna).  Bijective on 64-bit
// words with good avalanche; used for stream-id derivation only, never as
// the output generator.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a, used to map domain-separation tags ("env", "walk", ...) to words.
inline constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// Identifies one logical random stream.  Derive sub-streams with child();
// derivation is pure, so the same path of tags/indices always names the
// same stream.
struct SeedSpec {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  [[nodiscard]] constexpr SeedSpec child(std::uint64_t word) const {
    return SeedSpec{master, detail::mix64(stream ^ detail::mix64(word))};
  }
  [[nodiscard]] constexpr SeedSpec child(std::string_view tag) const {
    return child(detail::hash_tag(tag));
  }

  friend constexpr bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// Philox4x32-10 block function.  Key = stream id, counter = (block index,
// master seed); each block yields four 32-bit words.
struct PhiloxBlock {
  std::uint32_t w[4];
};

inline PhiloxBlock philox4x32(std::uint64_t block, const SeedSpec& seed) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWey0 = 0x9E3779B9u, kWey1 = 0xBB67AE85u;

  std::uint32_t c0 = static_cast<std::uint32_t>(block);
  std::uint32_t c1 = static_cast<std::uint32_t>(block >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(seed.master);
  std::uint32_t c3 = static_cast<std::uint32_t>(seed.master >> 32);
  std::uint32_t k0 = static_cast<std::uint32_t>(seed.stream);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed.stream >> 32);

  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c0;
    const std::uint64_t p1 = std::uint64_t{kMul1} * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += kWey0;
    k1 += kWey1;
  }
  return PhiloxBlock{{c0, c1, c2, c3}};
}

// Buffered word-at-a-time view of one stream.  Cheap to construct; make one
// per replica rather than sharing across threads.
class RandomEngine {
 public:
  explicit RandomEngine(const SeedSpec& seed) : seed_(seed) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      buf_ = philox4x32(block_++, seed_);
      pos_ = 0;
    }
    return buf_.w[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Uniform on [0, 1), 53-bit resolution.  Use for threshold comparisons.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1].  Use where a logarithm or power of the draw is taken.
  double next_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached, so consumption alternates between two u64 draws and none.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_open()));
    const double theta = 6.283185307179586476925286766559 * next_double();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  const SeedSpec& seed() const { return seed_; }

 private:
  SeedSpec seed_;
  PhiloxBlock buf_{};
  std::uint64_t block_ = 0;
  int pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Gamma(shape) sampler, Marsaglia-Tsang squeeze method with the
// shape-boosting transform for shape < 1.  Used for Beta draws in the
// Bernoulli-bias environment family.
inline double sample_gamma(RandomEngine& eng, double shape) {
  if (shape < 1.0) {
    const double u = eng.next_open();
    return sample_gamma(eng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = eng.next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = eng.next_open();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double sample_beta(RandomEngine& eng, double a, double b) {
  const double x = sample_gamma(eng, a);
  const double y = sample_gamma(eng, b);
  return x / (x + y);
}

}  // namespace rwre
