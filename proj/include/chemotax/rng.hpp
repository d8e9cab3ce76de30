#pragma once

#include <cmath>
#include <cstdint>

namespace chemotax {

// Counter-based RNG: every variate is a pure function of (seed, stream,
// index, purpose), so draws are reproducible independently of evaluation
// order and thread count. The mixer is the splitmix64 finalizer, applied
// twice for avalanche margin on structured keys.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Per-stream key; hoist out of per-particle loops (constant within a step).
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

// purpose must stay below 8 so (index, purpose) packs injectively.
inline std::uint64_t draw_u64(std::uint64_t key, std::uint64_t index, std::uint64_t purpose) {
    return mix64(key ^ ((index * 8ULL + purpose + 1ULL) * 0x9e3779b97f4a7c15ULL));
}

// Uniform in [0, 1) with 53-bit resolution.
inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

inline double uniform01(std::uint64_t key, std::uint64_t index, std::uint64_t purpose) {
    return to_unit(draw_u64(key, index, purpose));
}

} // namespace rng

struct Vec3 {
    double x, y, z;
};

// Isotropic unit velocity from two uniforms in [0, 1):
//   vx = 1 - 2 u1,  vy = sqrt(1 - vx^2) cos(2 pi u2),  vz = sqrt(1 - vx^2) sin(2 pi u2).
// vx is uniform on (-1, 1] and vx^2 + vy^2 + vz^2 = 1 to round-off.
inline Vec3 sample_velocity(double u1, double u2) {
    const double vx = 1.0 - 2.0 * u1;
    const double r = std::sqrt(1.0 - vx * vx);
    const double phi = 6.283185307179586476925286766559 * u2;
    return Vec3{vx, r * std::cos(phi), r * std::sin(phi)};
}

} // namespace chemotax
