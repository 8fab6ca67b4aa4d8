#ifndef NMF_NUMBER_FORMAT_HPP
#define NMF_NUMBER_FORMAT_HPP

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace nmf {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

/// Parses a full token as a double; returns false on any trailing junk.
inline bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace nmf

#endif  // NMF_NUMBER_FORMAT_HPP
