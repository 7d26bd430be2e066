#pragma once

#include <cstdint>
#include <string_view>

namespace kglit {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t h = kFnvOffset) {
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

/// Streaming FNV-1a, used for input-file fingerprints in run manifests.
class Fingerprint {
 public:
  void update(std::string_view data) { hash_ = fnv1a64(data, hash_); }
  std::uint64_t value() const { return hash_; }
  std::string hex() const;

 private:
  std::uint64_t hash_ = kFnvOffset;
};

std::string to_hex(std::uint64_t v);

inline std::string Fingerprint::hex() const { return to_hex(hash_); }

std::string file_fingerprint(const std::string& path);

}  // namespace kglit
