#include "sojourn/rng.hpp"

#include <cmath>
#include <numbers>

namespace sojourn {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    // 53 bits, shifted by half an ulp so that 0 and 1 are never produced.
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((1ULL << 53) - 1)) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

StreamRng::StreamRng(StreamId id) noexcept : id_(id) {
    const std::uint64_t k = splitmix64(id.seed ^ splitmix64(id.purpose));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

std::array<std::uint32_t, 4> StreamRng::next_block() noexcept {
    const std::array<std::uint32_t, 4> ctr{
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(id_.chunk), static_cast<std::uint32_t>(id_.chunk >> 32)};
    ++block_;
    return philox4x32_10(ctr, key_);
}

StreamRng::result_type StreamRng::operator()() noexcept {
    if (buffered_ == 0) {
        buffer_ = next_block();
        buffered_ = 4;
    }
    return buffer_[4 - buffered_--];
}

double StreamRng::uniform() noexcept {
    const std::uint32_t hi = (*this)();
    const std::uint32_t lo = (*this)();
    return to_open_unit(hi, lo);
}

void StreamRng::fill_normal(std::span<double> out) noexcept {
    std::size_t i = 0;
    while (i < out.size()) {
        const auto b = next_block();
        const double u1 = to_open_unit(b[0], b[1]);
        const double u2 = to_open_unit(b[2], b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        out[i++] = r * std::cos(theta);
        if (i < out.size()) out[i++] = r * std::sin(theta);
    }
}

double StreamRng::normal() noexcept {
    double z = 0.0;
    fill_normal(std::span<double>(&z, 1));
    return z;
}

}  // namespace sojourn
