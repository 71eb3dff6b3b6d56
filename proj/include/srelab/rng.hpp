#pragma once

// Counter-based pseudo-random streams.
//
// A Stream is identified by (master_seed, path), where the path is the
// sequence of child indices taken from the root.  The identity is folded
// into a 64-bit key; outputs are produced by a 10-round Philox-style block
// function applied to (key, block counter).  Consequences:
//   * a stream's output depends only on its identity, never on how many
//     draws its parent made or in which order siblings were created;
//   * copies of a stream replay the same sequence;
//   * any worker layout over replications yields identical draws.

#include <cmath>
#include <cstdint>

namespace srelab::rng {

namespace detail {

inline constexpr uint64_t kPhiloxMul = 0xD2B74407B1CE6E93ULL;
inline constexpr uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;
inline constexpr uint64_t kRootSalt = 0x8BB84B93962EAEFAULL;
inline constexpr uint64_t kChildSalt = 0x2545F4914F6CDD1DULL;

// 64-bit finalizer (splitmix64 / Stafford mix13).
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Philox 2x64, 10 rounds.  Maps (key, 128-bit counter) -> 128 output bits.
inline void philox2x64(uint64_t key, uint64_t ctr_hi, uint64_t ctr_lo,
                       uint64_t out[2]) {
  uint64_t c0 = ctr_hi, c1 = ctr_lo, k = key;
  for (int r = 0; r < 10; ++r) {
    unsigned __int128 prod = static_cast<unsigned __int128>(kPhiloxMul) * c0;
    uint64_t lo = static_cast<uint64_t>(prod);
    uint64_t hi = static_cast<uint64_t>(prod >> 64);
    c0 = hi ^ k ^ c1;
    c1 = lo;
    k += kWeyl;
  }
  out[0] = c0;
  out[1] = c1;
}

}  // namespace detail

class Stream {
 public:
  // Root stream of a master seed.
  explicit Stream(uint64_t master_seed)
      : key_(detail::mix64(master_seed ^ detail::kRootSalt)) {}

  // Child stream; depends only on this stream's identity and `index`.
  Stream child(uint64_t index) const {
    Stream s(*this);
    s.key_ = detail::mix64(key_ ^ detail::mix64(index + detail::kChildSalt));
    s.block_ = 0;
    s.have_word_ = false;
    s.have_spare_ = false;
    return s;
  }

  uint64_t key() const { return key_; }

  uint64_t next_u64() {
    if (have_word_) {
      have_word_ = false;
      return word_;
    }
    uint64_t out[2];
    detail::philox2x64(key_, 0, block_++, out);
    word_ = out[1];
    have_word_ = true;
    return out[0];
  }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method (second value cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  double exponential() { return -std::log(uniform()); }

 private:
  uint64_t key_;
  uint64_t block_ = 0;
  uint64_t word_ = 0;
  bool have_word_ = false;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline Stream make_stream(uint64_t master_seed) { return Stream(master_seed); }

inline Stream split(const Stream& parent, uint64_t index) {
  return parent.child(index);
}

}  // namespace srelab::rng
