#include "diffudict/numfmt.hpp"

#include <cstdio>

namespace diffudict {

std::string fmt_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf);
}

}  // namespace diffudict
