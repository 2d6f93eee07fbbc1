#pragma once

#include <cstdint>

namespace hotstate {

// Self-contained xoshiro256++ generator.  Standard-library distributions are
// avoided throughout: their output sequences are implementation-defined,
// which would make seeded runs non-portable.  Streams are split by hashing
// (master seed, ids...) with splitmix64, so per-segment / per-replication
// substreams are independent of the order in which worker threads touch
// them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from a master seed and up to three ids.
  static Rng substream(std::uint64_t master, std::uint64_t id0,
                       std::uint64_t id1 = 0, std::uint64_t id2 = 0);

  std::uint64_t next_u64();

  double uniform();                  // strictly inside (0,1)
  double exponential(double rate);   // rate > 0
  double normal();                   // standard normal, Marsaglia polar
  double gamma(double shape, double rate);

 private:
  std::uint64_t s_[4];
};

}  // namespace hotstate
