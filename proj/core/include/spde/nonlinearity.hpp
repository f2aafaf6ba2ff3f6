#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace spde {

enum class NonlinearityKind { linear, rational, sine_plus, log1p, zero, custom };

/// CLI tag: linear, rational, sineplus, log1p, zero, custom.
std::string_view to_string(NonlinearityKind kind) noexcept;
std::optional<NonlinearityKind> parse_nonlinearity(std::string_view tag) noexcept;

/// Diffusion coefficient g with g(0) = 0 and its ratio f(v) = g(v)/v, f(0) = g'(0).
///
/// Catalogue (lambda = intensity):
///   linear     g(v) = lambda v
///   rational   g(v) = lambda v / (1 + v^2)
///   sine_plus  g(v) = lambda (sin v + v)
///   log1p      g(v) = lambda ln(1 + v), continued below v* = -1 + 1e-6 by its tangent line
///   zero       g(v) = 0
class Nonlinearity {
public:
    using Function = std::function<double(double)>;

    /// Below v* = -1 + log1p_domain_margin the log1p entry is affine.
    static constexpr double log1p_domain_margin = 1e-6;
    /// For 0 < |v| < this, f(v) returns g'(0).
    static constexpr double near_zero = 1e-12;

    static Nonlinearity make(NonlinearityKind kind, double intensity);
    static Nonlinearity linear(double intensity) { return make(NonlinearityKind::linear, intensity); }
    static Nonlinearity rational(double intensity) { return make(NonlinearityKind::rational, intensity); }
    static Nonlinearity sine_plus(double intensity) { return make(NonlinearityKind::sine_plus, intensity); }
    static Nonlinearity log1p(double intensity) { return make(NonlinearityKind::log1p, intensity); }
    static Nonlinearity zero() { return make(NonlinearityKind::zero, 0.0); }
    /// Throws std::invalid_argument unless |g(0)| <= 1e-14.
    static Nonlinearity custom(std::string name, Function g, double derivative_at_zero, double lipschitz);

    NonlinearityKind kind() const noexcept { return kind_; }
    double intensity() const noexcept { return intensity_; }
    std::string name() const;

    double g(double v) const {
        switch (kind_) {
            case NonlinearityKind::linear: return intensity_ * v;
            case NonlinearityKind::rational: return intensity_ * v / (1.0 + v * v);
            case NonlinearityKind::sine_plus: return intensity_ * (std::sin(v) + v);
            case NonlinearityKind::log1p: return intensity_ * extended_log1p(v);
            case NonlinearityKind::zero: return 0.0;
            case NonlinearityKind::custom: return custom_g_(v);
        }
        return 0.0;
    }

    double f(double v) const {
        if (std::abs(v) < near_zero) return derivative_at_zero_;
        switch (kind_) {
            case NonlinearityKind::linear: return intensity_;
            case NonlinearityKind::rational: return intensity_ / (1.0 + v * v);
            case NonlinearityKind::sine_plus: return intensity_ * (std::sin(v) / v + 1.0);
            case NonlinearityKind::zero: return 0.0;
            default: return g(v) / v;
        }
    }

    double derivative_at_zero() const noexcept { return derivative_at_zero_; }

    /// Global Lipschitz constant of g; |f| never exceeds it.
    double lipschitz() const noexcept { return lipschitz_; }

private:
    Nonlinearity(NonlinearityKind kind, double intensity, double derivative_at_zero, double lipschitz,
                 Function custom_g = {}, std::string custom_name = {});

    static double extended_log1p(double v) {
        constexpr double v_star = -1.0 + log1p_domain_margin;
        if (v >= v_star) return std::log1p(v);
        return std::log(log1p_domain_margin) + (v - v_star) / log1p_domain_margin;
    }

    NonlinearityKind kind_;
    double intensity_;
    double derivative_at_zero_;
    double lipschitz_;
    Function custom_g_;
    std::string custom_name_;
};

inline double eval_g(const Nonlinearity& nl, double v) { return nl.g(v); }
inline double eval_f(const Nonlinearity& nl, double v) { return nl.f(v); }

}  // namespace spde
