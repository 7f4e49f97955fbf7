#ifndef BSD_RNG_HPP
#define BSD_RNG_HPP

#include <cstdint>
#include <random>

namespace bsd {

/// splitmix64 finalizer; used both as a mixing step when deriving
/// per-replicate seeds and to decorrelate user-supplied seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic seed for one replicate of one study cell.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                 std::uint64_t replicate) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (cell * 0x9e3779b97f4a7c15ULL));
    h = splitmix64(h ^ (replicate * 0xc2b2ae3d27d4eb4fULL));
    return h;
}

/// Seeded stream of uniforms on (0,1). mt19937_64 has a standardized
/// sequence, so output is bit-identical across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform draw strictly inside (0,1), 53-bit resolution.
    double uniform() {
        std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t next_u64() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace bsd

#endif
