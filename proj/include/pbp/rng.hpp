#pragma once

#include <cstdint>

namespace pbp {

// Source of random primitives. Virtual so tests can stub exact draws.
// All composite draws are built on uniform01/normal01, which keeps a
// stubbed subclass in full control of the stream.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  virtual double uniform01() = 0;           // open interval (0,1)
  virtual double normal01();
  virtual long poisson(double lam);
  virtual long binomial(long n, double z);
  virtual double gamma_draw(double shape, double rate);
  virtual double beta_draw(double a, double b);
  virtual double exponential(double rate);
  virtual long geometric(double z);         // failures before first success
  virtual long neg_binomial(double r, double z);

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  double normal(double mu, double var);
};

// Counter-based splitmix64 generator: the stream is a pure function of
// (key, counter), so split() hands out statistically independent child
// streams without shared state.
class Rng final : public RandomSource {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  double uniform01() override {
    // 53-bit mantissa, offset by half an ulp so 0 is never returned
    return (static_cast<double>(next_u64() >> 11) + 0.5) *
           (1.0 / 9007199254740992.0);
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

  Rng split() { return Rng(next_u64()); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace pbp
