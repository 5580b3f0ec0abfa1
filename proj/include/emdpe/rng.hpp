#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace emdpe {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Combines a master seed with a sequence of stream identifiers into an
/// independent seed. Order matters.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts);

/// FNV-1a, used to turn experiment names into stream identifiers.
std::uint64_t hash_name(std::string_view name);

}  // namespace emdpe
