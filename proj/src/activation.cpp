#include "widelab/activation.hpp"

#include "widelab/errors.hpp"

namespace widelab {

namespace {
constexpr ActivationKind kAllActivations[] = {
    ActivationKind::sigmoid,  ActivationKind::tanh,
    ActivationKind::arctan,   ActivationKind::erf,
    ActivationKind::identity, ActivationKind::constant_zero,
    ActivationKind::relu};
}

std::string_view to_string(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::arctan: return "arctan";
    case ActivationKind::erf: return "erf";
    case ActivationKind::identity: return "identity";
    case ActivationKind::constant_zero: return "constant_zero";
    case ActivationKind::relu: return "relu";
  }
  return "identity";
}

std::string_view to_string(Smoothness s) noexcept {
  switch (s) {
    case Smoothness::bounded_smooth: return "C_b^inf";
    case Smoothness::unbounded: return "unbounded";
    case Smoothness::nonsmooth: return "nonsmooth";
  }
  return "nonsmooth";
}

ActivationKind parse_activation(std::string_view name) {
  for (auto kind : kAllActivations) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("activation", "unknown activation '" + std::string(name) + "'");
}

std::optional<double> sup_norm(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::sigmoid:
    case ActivationKind::tanh:
    case ActivationKind::erf: return 1.0;
    case ActivationKind::arctan: return std::numbers::pi / 2.0;
    case ActivationKind::constant_zero: return 0.0;
    case ActivationKind::identity:
    case ActivationKind::relu: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<std::string> regularity_warning(ActivationKind kind,
                                              std::string_view context) {
  const Smoothness s = smoothness_of(kind);
  if (s == Smoothness::bounded_smooth) return std::nullopt;
  return "warning: activation '" + std::string(to_string(kind)) + "' is " +
         std::string(to_string(s)) + "; " + std::string(context) +
         " assumes a bounded activation with bounded derivatives, so the "
         "result is exploratory";
}

}  // namespace widelab
