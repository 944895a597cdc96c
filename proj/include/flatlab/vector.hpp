#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace flatlab {

// Every failure in the library is reported through this one exception type;
// `kind` lets callers (and the CLI) dispatch without parsing messages.
enum class ErrorKind {
  NonClosedTriangle,
  DegenerateTriangle,
  Disconnected,
  BadPairing,
  ParseError,
  ValidationError,
  BoundTooLarge,
  NoConePoints,
  GhostHitsSingularity,
  SegmentHitsSingularity,
  NotSimpleZeros,
  NotOrderTwo,
  Intersecting,
  SharedZeroMismatch,
  SharedZero,
  NotGeneric,
  InsertionFailed,
  SeedNotFound,
  DegenerationDuringPerturbation,
  EmptySamples,
  DimensionMismatch,
  MixedStrata,
  InvalidArgument,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonClosedTriangle: return "NonClosedTriangle";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::BadPairing: return "BadPairing";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::BoundTooLarge: return "BoundTooLarge";
    case ErrorKind::NoConePoints: return "NoConePoints";
    case ErrorKind::GhostHitsSingularity: return "GhostHitsSingularity";
    case ErrorKind::SegmentHitsSingularity: return "SegmentHitsSingularity";
    case ErrorKind::NotSimpleZeros: return "NotSimpleZeros";
    case ErrorKind::NotOrderTwo: return "NotOrderTwo";
    case ErrorKind::Intersecting: return "Intersecting";
    case ErrorKind::SharedZeroMismatch: return "SharedZeroMismatch";
    case ErrorKind::SharedZero: return "SharedZero";
    case ErrorKind::NotGeneric: return "NotGeneric";
    case ErrorKind::InsertionFailed: return "InsertionFailed";
    case ErrorKind::SeedNotFound: return "SeedNotFound";
    case ErrorKind::DegenerationDuringPerturbation: return "DegenerationDuringPerturbation";
    case ErrorKind::EmptySamples: return "EmptySamples";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MixedStrata: return "MixedStrata";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Holonomy vector in the flat metric. In exact mode both components hold
/// integers; all sums, differences and cross products of such values stay
/// exact in double precision as long as magnitudes stay below 2^26.
struct PlanarVector {
  double x = 0.0;
  double y = 0.0;

  constexpr PlanarVector() = default;
  constexpr PlanarVector(double x_, double y_) : x(x_), y(y_) {}

  constexpr PlanarVector operator+(PlanarVector o) const { return {x + o.x, y + o.y}; }
  constexpr PlanarVector operator-(PlanarVector o) const { return {x - o.x, y - o.y}; }
  constexpr PlanarVector operator-() const { return {-x, -y}; }
  constexpr PlanarVector operator*(double s) const { return {x * s, y * s}; }
  PlanarVector& operator+=(PlanarVector o) { x += o.x; y += o.y; return *this; }
  PlanarVector& operator-=(PlanarVector o) { x -= o.x; y -= o.y; return *this; }

  constexpr bool operator==(const PlanarVector&) const = default;

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
};

inline constexpr double cross(PlanarVector a, PlanarVector b) { return a.x * b.y - a.y * b.x; }
inline constexpr double dot(PlanarVector a, PlanarVector b) { return a.x * b.x + a.y * b.y; }

/// y > 0, or y == 0 and x > 0.
inline constexpr bool is_canonical(PlanarVector v) { return v.y > 0 || (v.y == 0 && v.x > 0); }
inline constexpr PlanarVector canonical(PlanarVector v) { return is_canonical(v) ? v : -v; }

inline bool is_integral(PlanarVector v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::floor(v.x) == v.x &&
         std::floor(v.y) == v.y;
}

inline bool nearly_equal(PlanarVector a, PlanarVector b, double tol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol;
}

inline std::ostream& operator<<(std::ostream& os, PlanarVector v) {
  return os << '(' << v.x << ", " << v.y << ')';
}

/// Sign of a cross product with an absolute tolerance; tol == 0 is exact.
inline int orientation(PlanarVector a, PlanarVector b, double tol = 0.0) {
  const double c = cross(a, b);
  if (c > tol) return 1;
  if (c < -tol) return -1;
  return 0;
}

}  // namespace flatlab
