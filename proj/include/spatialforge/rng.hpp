#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace spatialforge {

// FNV-1a, used for seed derivation and config hashing.
constexpr uint64_t fnv1a64(std::string_view s, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derive a child seed from a root seed and a scope string (scene id, task
// tag, ...). Stable across platforms and runs.
inline uint64_t derive_seed(uint64_t root, std::string_view scope) {
  uint64_t h = fnv1a64(scope);
  // splitmix-style finalizer over the combination
  uint64_t z = root ^ (h + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic generator with portable uniform draws. std distributions are
// implementation-defined, so all sampling goes through these methods.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

  uint64_t next_u64() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n), n > 0
  uint64_t below(uint64_t n) { return next_u64() % n; }

  // [lo, hi] inclusive
  int64_t range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool chance(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(below(v.size()))];
  }

 private:
  uint64_t state_;
};

}  // namespace spatialforge
