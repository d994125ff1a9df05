#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace sojourn {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
///
/// Maps a 128-bit counter and a 64-bit key to 128 random bits. There is no
/// hidden state, so any (key, counter) pair can be evaluated independently.
[[nodiscard]] std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                                         std::array<std::uint32_t, 2> key) noexcept;

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Identifies one independent random stream: the run seed, a purpose tag that
/// separates unrelated consumers (experiment vs. constant estimation, S index, ...)
/// and the chunk index of the deterministic parallel schedule.
struct StreamId {
    std::uint64_t seed = 0;
    std::uint64_t purpose = 0;
    std::uint64_t chunk = 0;

    friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// Purpose tags are composed hierarchically by callers.
[[nodiscard]] constexpr std::uint64_t sub_purpose(std::uint64_t parent, std::uint64_t child) noexcept {
    return parent * 0x100000001b3ULL + child + 1;
}

/// Sequential view of a Philox stream. The Philox key is derived from
/// (seed, purpose); the high half of the counter holds the chunk index and the
/// low half counts 128-bit blocks drawn so far.
class StreamRng {
public:
    using result_type = std::uint32_t;

    explicit StreamRng(StreamId id) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on the open interval (0, 1) with 53 random bits.
    [[nodiscard]] double uniform() noexcept;

    /// Standard normal variates via Box-Muller, two per Philox block.
    void fill_normal(std::span<double> out) noexcept;
    [[nodiscard]] double normal() noexcept;

    [[nodiscard]] const StreamId& id() const noexcept { return id_; }
    /// Number of Philox blocks consumed; together with id() this identifies the stream position.
    [[nodiscard]] std::uint64_t position() const noexcept { return block_; }

private:
    std::array<std::uint32_t, 4> next_block() noexcept;

    StreamId id_;
    std::array<std::uint32_t, 2> key_{};
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
};

}  // namespace sojourn
