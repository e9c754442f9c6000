#include <openssl/evp.h>

#include <stdexcept>
#include <string>

#include "silc/cluster.hpp"
#include "silc/digest.hpp"

namespace silc {

Sha256 sha256(std::string_view data) {
  Sha256 out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size())
    throw std::runtime_error("sha256 failed");
  return out;
}

std::string to_hex(const Sha256& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : digest) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 15]);
  }
  return s;
}

std::uint32_t shard(VideoId video, std::uint32_t n_servers) {
  if (n_servers == 0) throw std::invalid_argument("n_servers must be >= 1");
  const auto d = sha256(std::to_string(video));
  std::uint64_t prefix = 0;
  for (int i = 0; i < 8; ++i) prefix = (prefix << 8) | d[i];
  return static_cast<std::uint32_t>(prefix % n_servers);
}

}  // namespace silc
