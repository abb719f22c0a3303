#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace talkgen {

// Thrown when a caller violates an operation's contract (bad shapes, bad args).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown for runtime failures: I/O, missing checkpoints, non-finite losses.
struct RuntimeFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void format_into(std::ostringstream&) {}
template <typename T, typename... Rest>
void format_into(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  format_into(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string str_cat(const Args&... args) {
  std::ostringstream os;
  detail::format_into(os, args...);
  return os.str();
}

#define TG_CHECK(cond, ...)                                              \
  do {                                                                   \
    if (!(cond))                                                         \
      throw ::talkgen::RuntimeFault(                                     \
          ::talkgen::str_cat("check failed (", #cond, "): ", __VA_ARGS__)); \
  } while (0)

#define TG_CHECK_ARG(cond, ...)                                          \
  do {                                                                   \
    if (!(cond))                                                         \
      throw ::talkgen::ArgumentError(::talkgen::str_cat(__VA_ARGS__));   \
  } while (0)

// FNV-1a, used for config digests and seed derivation.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a(s.data(), s.size(), h);
}

inline std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Derives a child seed from a parent seed and a role label.
inline uint64_t derive_seed(uint64_t seed, const std::string& role) {
  uint64_t h = fnv1a(role);
  h ^= seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

}  // namespace talkgen
