#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace silc {

using Sha256 = std::array<std::uint8_t, 32>;

/// SHA-256 (OpenSSL EVP).
Sha256 sha256(std::string_view data);
std::string to_hex(const Sha256& digest);

}  // namespace silc
