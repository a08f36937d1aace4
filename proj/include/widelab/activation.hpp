#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace widelab {

enum class ActivationKind { sigmoid, tanh, arctan, erf, identity, constant_zero, relu };

/// Regularity class of an activation, as far as the convergence theorems care.
enum class Smoothness { bounded_smooth, unbounded, nonsmooth };

std::string_view to_string(ActivationKind kind) noexcept;
std::string_view to_string(Smoothness s) noexcept;
ActivationKind parse_activation(std::string_view name);

constexpr Smoothness smoothness_of(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::identity: return Smoothness::unbounded;
    case ActivationKind::relu: return Smoothness::nonsmooth;
    default: return Smoothness::bounded_smooth;
  }
}

/// sup |sigma|, or nullopt for unbounded activations.
std::optional<double> sup_norm(ActivationKind kind) noexcept;

inline double activate(ActivationKind kind, double x) noexcept {
  switch (kind) {
    case ActivationKind::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case ActivationKind::tanh: return std::tanh(x);
    case ActivationKind::arctan: return std::atan(x);
    case ActivationKind::erf: return std::erf(x);
    case ActivationKind::identity: return x;
    case ActivationKind::constant_zero: return 0.0;
    case ActivationKind::relu: return x > 0.0 ? x : 0.0;
  }
  return 0.0;
}

/// Warning text when `kind` falls outside the bounded-smooth class that
/// `context` assumes; nullopt when the activation qualifies.
std::optional<std::string> regularity_warning(ActivationKind kind,
                                              std::string_view context);

}  // namespace widelab
