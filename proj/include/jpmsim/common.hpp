#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace jpmsim {

/// Magnetic flux quantum h/2e in webers.
inline constexpr double kFluxQuantum = 2.067833848e-15;
/// Reduced Planck constant in joule-seconds.
inline constexpr double kHbar = 1.054571817e-34;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when an iterative solver, fit, or quadrature cannot reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for inputs that violate an operation's preconditions in a way that
/// is specific to the physics (degenerate centroids, unidentifiable grids).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Selects between the OpenMP kernel and the plain serial reference loop.
enum class Execution { serial, parallel };

}  // namespace jpmsim
