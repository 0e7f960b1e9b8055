#include <spoisson/rng.hpp>

#include <cmath>
#include <numbers>

namespace spoisson {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox::bijection(Counter c, std::array<std::uint32_t, 2> k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

Philox::Philox(std::uint64_t seed, Counter counter) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, counter_(counter) {}

std::array<std::uint32_t, 4> Philox::next_block() noexcept {
  const auto out = bijection(counter_, key_);
  ++counter_[0];
  return out;
}

double Philox::uniform() noexcept {
  if (buffered_ == 0) {
    buffer_ = next_block();
    buffered_ = 2;
  }
  // 53 random bits from two words, shifted off zero.
  const int i = 2 - buffered_;
  --buffered_;
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(buffer_[2 * i]) << 21) ^ (static_cast<std::uint64_t>(buffer_[2 * i + 1]) >> 11);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Philox::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

Philox make_stream(std::uint64_t seed, StreamTag tag, std::uint32_t draw, std::uint32_t component) noexcept {
  return Philox(seed, {0u, component, draw, static_cast<std::uint32_t>(tag)});
}

}  // namespace spoisson
