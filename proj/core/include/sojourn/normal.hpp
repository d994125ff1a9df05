#pragma once

namespace sojourn {

/// Standard normal tail Psi(u) = P(N > u), evaluated through erfc so that
/// there is no cancellation for large u.
[[nodiscard]] double normal_tail(double u) noexcept;

[[nodiscard]] double normal_density(double u) noexcept;

/// Inverse of normal_tail on (0, 1).
[[nodiscard]] double normal_tail_inverse(double p);

}  // namespace sojourn
