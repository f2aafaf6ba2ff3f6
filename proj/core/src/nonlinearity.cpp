#include "spde/nonlinearity.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace spde {

namespace {
constexpr std::array<std::pair<NonlinearityKind, std::string_view>, 6> tags{{
    {NonlinearityKind::linear, "linear"},
    {NonlinearityKind::rational, "rational"},
    {NonlinearityKind::sine_plus, "sineplus"},
    {NonlinearityKind::log1p, "log1p"},
    {NonlinearityKind::zero, "zero"},
    {NonlinearityKind::custom, "custom"},
}};
}  // namespace

std::string_view to_string(NonlinearityKind kind) noexcept {
    for (const auto& [k, name] : tags)
        if (k == kind) return name;
    return "unknown";
}

std::optional<NonlinearityKind> parse_nonlinearity(std::string_view tag) noexcept {
    for (const auto& [k, name] : tags)
        if (name == tag && k != NonlinearityKind::custom) return k;
    return std::nullopt;
}

Nonlinearity::Nonlinearity(NonlinearityKind kind, double intensity, double derivative_at_zero, double lipschitz,
                           Function custom_g, std::string custom_name)
    : kind_(kind),
      intensity_(intensity),
      derivative_at_zero_(derivative_at_zero),
      lipschitz_(lipschitz),
      custom_g_(std::move(custom_g)),
      custom_name_(std::move(custom_name)) {}

Nonlinearity Nonlinearity::make(NonlinearityKind kind, double intensity) {
    if (!std::isfinite(intensity)) throw std::invalid_argument("nonlinearity intensity must be finite");
    const double a = std::abs(intensity);
    switch (kind) {
        case NonlinearityKind::linear: return {kind, intensity, intensity, a};
        case NonlinearityKind::rational: return {kind, intensity, intensity, a};
        case NonlinearityKind::sine_plus: return {kind, intensity, 2.0 * intensity, 2.0 * a};
        // The tangent continuation has slope 1 / margin, the steepest point of g.
        case NonlinearityKind::log1p: return {kind, intensity, intensity, a / log1p_domain_margin};
        case NonlinearityKind::zero: return {kind, 0.0, 0.0, 0.0};
        case NonlinearityKind::custom: break;
    }
    throw std::invalid_argument("custom nonlinearities are built with Nonlinearity::custom");
}

Nonlinearity Nonlinearity::custom(std::string name, Function g, double derivative_at_zero, double lipschitz) {
    if (!g) throw std::invalid_argument("custom nonlinearity needs an evaluator");
    if (std::abs(g(0.0)) > 1e-14) {
        throw std::invalid_argument("custom nonlinearity '" + name + "' violates g(0) = 0");
    }
    return {NonlinearityKind::custom, 1.0, derivative_at_zero, lipschitz, std::move(g), std::move(name)};
}

std::string Nonlinearity::name() const {
    if (kind_ == NonlinearityKind::custom) return custom_name_;
    return std::string(to_string(kind_));
}

}  // namespace spde
