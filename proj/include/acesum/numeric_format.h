#ifndef ACESUM_NUMERIC_FORMAT_H_
#define ACESUM_NUMERIC_FORMAT_H_

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace acesum {

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.size() > 1 && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace acesum

#endif  // ACESUM_NUMERIC_FORMAT_H_
