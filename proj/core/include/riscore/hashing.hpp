#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace riscore {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::uint64_t fnv1a64(std::string_view data) noexcept;

/// Per-item seed: mixes the run's global seed with a stable hash of the item id.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view item_id) noexcept;

}  // namespace riscore
