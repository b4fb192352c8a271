#pragma once

#include <array>
#include <cstdint>

namespace mcbound {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Each
/// (key, counter) pair maps to four independent 32-bit words, so a stream is
/// fully determined by its key and position and needs no shared state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Stream of uniforms in (0, 1] for one replica. The key is the run seed and
/// the upper counter words hold the replica index, so streams never overlap
/// and results do not depend on how replicas are scheduled across threads.
class ReplicaStream {
 public:
  ReplicaStream(std::uint64_t seed, std::uint64_t replica)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        replica_(replica) {}

  /// 53-bit uniform on (0, 1]; never returns 0, which keeps quantiles defined.
  double uniform() {
    if (pos_ >= 4) refill();
    const std::uint32_t hi = buf_[pos_++];
    if (pos_ >= 4) refill();
    const std::uint32_t lo = buf_[pos_++];
    const std::uint64_t bits = (std::uint64_t{hi >> 5} << 26) | (lo >> 6);
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

 private:
  void refill() {
    buf_ = Philox4x32::block({static_cast<std::uint32_t>(block_),
                              static_cast<std::uint32_t>(block_ >> 32),
                              static_cast<std::uint32_t>(replica_),
                              static_cast<std::uint32_t>(replica_ >> 32)},
                             key_);
    ++block_;
    pos_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t replica_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buf_{};
  int pos_ = 4;
};

}  // namespace mcbound
