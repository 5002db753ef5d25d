#include "efl/numio.hpp"

#include <charconv>
#include <system_error>

namespace efl {

std::string format_full(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace efl
