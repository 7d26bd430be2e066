#include "kglit/core/hash.hpp"

#include <fstream>

#include "kglit/core/error.hpp"

namespace kglit {

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for fingerprint: " + path);
  Fingerprint fp;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    fp.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return fp.hex();
}

}  // namespace kglit
