#include "mpdwr/scalar.hpp"

namespace mpdwr {

std::string_view to_string(Precision p) {
  switch (p) {
    case Precision::Half: return "half";
    case Precision::Single: return "single";
    case Precision::Double: return "double";
  }
  return "unknown";
}

Precision parse_precision(std::string_view name) {
  if (name == "half") return Precision::Half;
  if (name == "single" || name == "float") return Precision::Single;
  if (name == "double") return Precision::Double;
  throw std::invalid_argument("unknown precision '" + std::string(name) + "'");
}

}  // namespace mpdwr
