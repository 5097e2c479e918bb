#pragma once

// Floating-point precision kinds and conversions between them.
//
// Every numeric module in the toolkit is a template over a real type drawn
// from {half, float, double}. binary16 has no native arithmetic on most
// targets; Eigen::half stores 16 bits and rounds the result of every
// operation back to binary16 after computing it in binary32.

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace mpdwr {

using half = Eigen::half;

enum class Precision : std::uint8_t { Half = 0, Single = 1, Double = 2 };

template <class T>
concept Real = std::same_as<T, half> || std::same_as<T, float> || std::same_as<T, double>;

template <Real T>
struct PrecisionTraits;

template <>
struct PrecisionTraits<half> {
  static constexpr Precision kind = Precision::Half;
  static constexpr double eps = 9.765625e-4;  // 2^-10
  static constexpr int bytes = 2;
};

template <>
struct PrecisionTraits<float> {
  static constexpr Precision kind = Precision::Single;
  static constexpr double eps = 1.1920928955078125e-7;  // 2^-23
  static constexpr int bytes = 4;
};

template <>
struct PrecisionTraits<double> {
  static constexpr Precision kind = Precision::Double;
  static constexpr double eps = 2.220446049250313e-16;  // 2^-52
  static constexpr int bytes = 8;
};

template <Real T>
inline constexpr Precision precision_of = PrecisionTraits<T>::kind;

constexpr double epsilon(Precision p) {
  switch (p) {
    case Precision::Half: return PrecisionTraits<half>::eps;
    case Precision::Single: return PrecisionTraits<float>::eps;
    case Precision::Double: return PrecisionTraits<double>::eps;
  }
  return 0.0;
}

constexpr int bytes(Precision p) {
  switch (p) {
    case Precision::Half: return 2;
    case Precision::Single: return 4;
    case Precision::Double: return 8;
  }
  return 0;
}

constexpr Precision wider(Precision a, Precision b) { return a < b ? b : a; }

std::string_view to_string(Precision p);

/// Parses "half", "single" (or "float") and "double".
Precision parse_precision(std::string_view name);

/// The wider of two real types; mixed expressions are evaluated in it.
template <Real A, Real B>
using wider_t = std::conditional_t<(precision_of<A> >= precision_of<B>), A, B>;

/// Exact widening to binary64.
template <Real T>
constexpr double promote(T x) {
  return static_cast<double>(x);
}

namespace detail {

// binary64 -> binary16 through binary32 is a double rounding. Rounding to
// binary32 with round-to-odd first keeps the final result correctly rounded
// because binary32 carries more than two extra bits.
inline half double_to_half(double x) {
  float f = static_cast<float>(x);
  if (std::isfinite(x) && std::isfinite(f) && static_cast<double>(f) != x) {
    if (std::fabs(static_cast<double>(f)) > std::fabs(x)) f = std::nextafter(f, 0.0f);
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof bits);
    bits |= 1u;
    std::memcpy(&f, &bits, sizeof bits);
  }
  return half(f);
}

}  // namespace detail

/// Correctly rounds (nearest, ties to even) a binary64 value to T. Overflow
/// goes to +-inf.
template <Real T>
T round_to(double x) {
  if constexpr (std::same_as<T, half>) {
    return detail::double_to_half(x);
  } else {
    return static_cast<T>(x);
  }
}

/// Rounds between arbitrary precisions.
template <Real To, Real From>
To convert(From x) {
  if constexpr (std::same_as<To, From>) {
    return x;
  } else {
    return round_to<To>(promote(x));
  }
}

template <Real T>
T sqrt_of(T x) {
  if constexpr (std::same_as<T, half>) {
    return half(std::sqrt(static_cast<float>(x)));
  } else {
    return std::sqrt(x);
  }
}

template <Real T>
T abs_of(T x) {
  if constexpr (std::same_as<T, half>) {
    return half(std::fabs(static_cast<float>(x)));
  } else {
    return std::fabs(x);
  }
}

template <Real T>
bool is_finite(T x) {
  return std::isfinite(promote(x));
}

/// Dot product of two vectors stored at possibly different precisions.
/// Both operands are promoted to the wider precision and accumulated in it,
/// index-ascending.
template <Real A, Real B>
wider_t<A, B> mixed_dot(std::span<const A> a, std::span<const B> b) {
  using W = wider_t<A, B>;
  if (a.size() != b.size()) throw std::invalid_argument("mixed_dot: length mismatch");
  W acc = W(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc = acc + convert<W>(a[i]) * convert<W>(b[i]);
  }
  return acc;
}

/// Calls `f(std::type_identity<T>{})` with T the real type for `p`.
template <class F>
decltype(auto) dispatch(Precision p, F&& f) {
  switch (p) {
    case Precision::Half: return f(std::type_identity<half>{});
    case Precision::Single: return f(std::type_identity<float>{});
    case Precision::Double: break;
  }
  return f(std::type_identity<double>{});
}

}  // namespace mpdwr
