#ifndef SUBSCAN_RNG_HPP_
#define SUBSCAN_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace subscan {

/// Seeded generator whose output is fixed across platforms and standard
/// libraries.
///
/// The engine is std::mt19937_64, whose sequence the C++ standard pins
/// exactly. None of the std distributions are used since their algorithms
/// are implementation-defined. Derived values:
///   uniform()  = (next() >> 11) * 2^-53, in [0, 1)
///   below(n)   = rejection sampling on next() against the largest multiple
///                of n representable in 64 bits
///   coin()     = top bit of next()
///   normal()   = Box-Muller, u1 = 1 - uniform(), u2 = uniform(); the cosine
///                draw is returned first and the sine draw is cached
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  std::uint64_t below(std::uint64_t bound);
  bool coin() { return (next() >> 63) != 0; }
  double normal();

  /// k distinct values from [0, n), in ascending order (partial Fisher-Yates).
  std::vector<std::int64_t> sample_without_replacement(std::int64_t n,
                                                       std::int64_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer over (seed, stream); gives independent per-task seeds
/// so that results never depend on execution order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace subscan

#endif  // SUBSCAN_RNG_HPP_
