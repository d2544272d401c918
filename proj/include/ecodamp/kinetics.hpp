#pragma once

// Pointwise reaction kinetics for the three-species invasive food chain
// (prey u, middle predator v, invasive top predator r) and its three
// damping variants: prey refuge, refuge + overcrowding, and refuge +
// role reversal + overcrowding.

#include <algorithm>
#include <utility>
#include <vector>

#include "ecodamp/common.hpp"

namespace ecodamp {

// All model constants. The D* constants are half-saturation / protection
// levels and must stay strictly positive so no denominator can vanish on
// the nonnegative orthant.
struct ParameterSet {
    double a1 = 0.0;  // prey growth rate
    double a2 = 0.0;  // middle-predator death rate
    double b2 = 0.0;  // prey intraspecific competition
    double c = 0.0;   // invasive sexual-reproduction rate

    double w0 = 0.0, w1 = 0.0, w2 = 0.0, w3 = 0.0, w4 = 0.0, w5 = 0.0;
    double D0 = 1.0, D1 = 1.0, D2 = 1.0, D3 = 1.0, D4 = 1.0;

    double d1 = 0.0, d2 = 0.0, d3 = 0.0;  // diffusion coefficients
    double d4 = 0.0;                      // overcrowding (nonlinear self-diffusion)

    // c < w3/D3: the r^2 coefficient is negative inside a full refuge.
    bool subcritical() const { return c < w3 / D3; }

    void validate() const {
        auto fin = [](double x) { return std::isfinite(x); };
        for (double x : {a1, a2, b2, c, w0, w1, w2, w3, w4, w5, d1, d2, d3, d4})
            if (!fin(x) || x < 0.0) throw ConfigError("ParameterSet: rates must be finite and nonnegative");
        for (double x : {D0, D1, D2, D3, D4})
            if (!fin(x) || x <= 0.0) throw ConfigError("ParameterSet: D0..D4 must be strictly positive");
    }
};

// Prey refuge profile b1: space -> [0,1]. b1 = 1 protects v from r.
class RefugeProfile {
public:
    enum class Kind { Zero, One, TanhStep, Square, Circle, Custom };

    static RefugeProfile zero() { return RefugeProfile(Kind::Zero); }
    static RefugeProfile one() { return RefugeProfile(Kind::One); }

    // b1(x) = (1 - tanh((x-a)/eps)) / 2: refuge to the left of a.
    static RefugeProfile tanh_step(double center, double width) {
        require(width > 0.0, "tanh_step refuge: width must be positive");
        RefugeProfile p(Kind::TanhStep);
        p.center_ = center;
        p.width_ = width;
        return p;
    }

    // Centered square indicator: b1 = 1 for |x|<halfwidth and |y|<halfwidth.
    static RefugeProfile square(double halfwidth) {
        require(halfwidth >= 0.0, "square refuge: halfwidth must be nonnegative");
        RefugeProfile p(Kind::Square);
        p.size_ = halfwidth;
        return p;
    }

    // Centered circular indicator: b1 = 1 for x^2 + y^2 < threshold.
    // The threshold applies to the squared radius, as written in the model.
    static RefugeProfile circle(double radius_sq_threshold) {
        require(radius_sq_threshold >= 0.0, "circle refuge: threshold must be nonnegative");
        RefugeProfile p(Kind::Circle);
        p.size_ = radius_sq_threshold;
        return p;
    }

    // Tabulated 1-D profile; evaluation interpolates linearly and clamps to [0,1].
    static RefugeProfile tabulated(std::vector<double> xs, std::vector<double> values) {
        require(xs.size() == values.size() && xs.size() >= 2,
                "tabulated refuge: need matching x/value arrays of length >= 2");
        for (std::size_t i = 1; i < xs.size(); ++i)
            require(xs[i] > xs[i - 1], "tabulated refuge: x must be strictly increasing");
        RefugeProfile p(Kind::Custom);
        p.xs_ = std::move(xs);
        p.values_ = std::move(values);
        return p;
    }

    Kind kind() const { return kind_; }
    double center() const { return center_; }
    double width() const { return width_; }
    double size() const { return size_; }

    double eval(Point pt) const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::One: return 1.0;
            case Kind::TanhStep: return 0.5 * (1.0 - std::tanh((pt.x - center_) / width_));
            case Kind::Square: return (std::abs(pt.x) < size_ && std::abs(pt.y) < size_) ? 1.0 : 0.0;
            case Kind::Circle: return (pt.x * pt.x + pt.y * pt.y < size_) ? 1.0 : 0.0;
            case Kind::Custom: return eval_table(pt.x);
        }
        return 0.0;
    }

private:
    explicit RefugeProfile(Kind k) : kind_(k) {}

    double eval_table(double x) const {
        if (x <= xs_.front()) return clamp01(values_.front());
        if (x >= xs_.back()) return clamp01(values_.back());
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
        return clamp01((1.0 - t) * values_[i - 1] + t * values_[i]);
    }

    static double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

    Kind kind_;
    double center_ = 0.0, width_ = 1.0, size_ = 0.0;
    std::vector<double> xs_, values_;
};

inline double refuge_eval(const RefugeProfile& profile, Point pt) { return profile.eval(pt); }

enum class VariantTag {
    Classical,                     // Eqs. for the unmodified food chain
    RefugeOnly,                    // prey refuge in the v and r equations
    RefugeOvercrowd,               // refuge reactions plus the d4 (r^2)_xx flux
    RefugeRoleReversalOvercrowd,   // role reversal of u in the open area, plus d4 flux
};

// Model selector: a variant tag plus the refuge profile it samples.
// Classical carries the zero profile so reaction evaluation is uniform.
struct ModelVariant {
    VariantTag tag = VariantTag::Classical;
    RefugeProfile refuge = RefugeProfile::zero();

    static ModelVariant classical() { return {VariantTag::Classical, RefugeProfile::zero()}; }
    static ModelVariant refuge_only(RefugeProfile p) { return {VariantTag::RefugeOnly, std::move(p)}; }
    static ModelVariant refuge_overcrowd(RefugeProfile p) { return {VariantTag::RefugeOvercrowd, std::move(p)}; }
    static ModelVariant refuge_role_reversal_overcrowd(RefugeProfile p) {
        return {VariantTag::RefugeRoleReversalOvercrowd, std::move(p)};
    }

    // The d4 flux is a solver-side term; it never contributes pointwise.
    bool has_overcrowding() const {
        return tag == VariantTag::RefugeOvercrowd || tag == VariantTag::RefugeRoleReversalOvercrowd;
    }
};

// Non-diffusive right-hand sides (f for u, g for v, h for r).
struct Reaction {
    double f = 0.0, g = 0.0, h = 0.0;
};

struct ReactionJacobian {
    double fu = 0.0, fv = 0.0, fr = 0.0;
    double gu = 0.0, gv = 0.0, gr = 0.0;
    double hu = 0.0, hv = 0.0, hr = 0.0;
};

namespace detail {
inline void check_state(double u, double v, double r) {
    if (!(u >= 0.0 && v >= 0.0 && r >= 0.0))
        throw ConfigError("reaction: state components must be nonnegative");
}
}  // namespace detail

// Pointwise reactions with the refuge value b1 already sampled.
inline Reaction reaction_at(VariantTag tag, const ParameterSet& p, double u, double v, double r, double b1) {
    detail::check_state(u, v, r);
    Reaction out;
    switch (tag) {
        case VariantTag::Classical: {
            out.f = p.a1 * u - p.b2 * u * u - p.w0 * u * v / (u + p.D0);
            out.g = -p.a2 * v + p.w1 * u * v / (u + p.D1) - p.w2 * v * r / (v + p.D2);
            out.h = p.c * r * r - p.w3 * r * r / (v + p.D3);
            break;
        }
        case VariantTag::RefugeOnly:
        case VariantTag::RefugeOvercrowd: {
            const double q = 1.0 - b1;
            out.f = p.a1 * u - p.b2 * u * u - p.w0 * u * v / (u + p.D0);
            out.g = -p.a2 * v + p.w1 * u * v / (u + p.D1) - p.w2 * q * v * r / (v + p.D2);
            out.h = p.c * r * r - p.w3 * r * r / (q * v + p.D3);
            break;
        }
        case VariantTag::RefugeRoleReversalOvercrowd: {
            const double q = 1.0 - b1;
            out.f = p.a1 * u - p.b2 * u * u + q * p.w5 * v * u / (v + p.D0) - b1 * p.w1 * u * v / (u + p.D3);
            out.g = -p.a2 * v + b1 * p.w1 * u * v / (u + p.D1)
                    - q * (p.w4 * v * u / (v + p.D2) + p.w2 * v * r / (v + p.D4));
            out.h = (p.c - p.w3 / (q * v + p.D3)) * r * r;
            break;
        }
    }
    return out;
}

inline Reaction reaction(const ModelVariant& variant, const ParameterSet& p, double u, double v, double r,
                         Point pt) {
    return reaction_at(variant.tag, p, u, v, r, variant.refuge.eval(pt));
}

// Analytic 3x3 Jacobian of the reactions with respect to (u, v, r).
inline ReactionJacobian reaction_jacobian(VariantTag tag, const ParameterSet& p, double u, double v, double r,
                                          double b1) {
    detail::check_state(u, v, r);
    ReactionJacobian J;
    switch (tag) {
        case VariantTag::Classical: {
            J.fu = p.a1 - 2.0 * p.b2 * u - p.w0 * v * p.D0 / sq(u + p.D0);
            J.fv = -p.w0 * u / (u + p.D0);
            J.gu = p.w1 * v * p.D1 / sq(u + p.D1);
            J.gv = -p.a2 + p.w1 * u / (u + p.D1) - p.w2 * r * p.D2 / sq(v + p.D2);
            J.gr = -p.w2 * v / (v + p.D2);
            J.hv = p.w3 * r * r / sq(v + p.D3);
            J.hr = 2.0 * p.c * r - 2.0 * p.w3 * r / (v + p.D3);
            break;
        }
        case VariantTag::RefugeOnly:
        case VariantTag::RefugeOvercrowd: {
            const double q = 1.0 - b1;
            J.fu = p.a1 - 2.0 * p.b2 * u - p.w0 * v * p.D0 / sq(u + p.D0);
            J.fv = -p.w0 * u / (u + p.D0);
            J.gu = p.w1 * v * p.D1 / sq(u + p.D1);
            J.gv = -p.a2 + p.w1 * u / (u + p.D1) - p.w2 * q * r * p.D2 / sq(v + p.D2);
            J.gr = -p.w2 * q * v / (v + p.D2);
            J.hv = p.w3 * r * r * q / sq(q * v + p.D3);
            J.hr = 2.0 * p.c * r - 2.0 * p.w3 * r / (q * v + p.D3);
            break;
        }
        case VariantTag::RefugeRoleReversalOvercrowd: {
            const double q = 1.0 - b1;
            J.fu = p.a1 - 2.0 * p.b2 * u + q * p.w5 * v / (v + p.D0) - b1 * p.w1 * v * p.D3 / sq(u + p.D3);
            J.fv = q * p.w5 * u * p.D0 / sq(v + p.D0) - b1 * p.w1 * u / (u + p.D3);
            J.gu = b1 * p.w1 * v * p.D1 / sq(u + p.D1) - q * p.w4 * v / (v + p.D2);
            J.gv = -p.a2 + b1 * p.w1 * u / (u + p.D1)
                   - q * (p.w4 * u * p.D2 / sq(v + p.D2) + p.w2 * r * p.D4 / sq(v + p.D4));
            J.gr = -q * p.w2 * v / (v + p.D4);
            J.hv = p.w3 * q * r * r / sq(q * v + p.D3);
            J.hr = 2.0 * r * (p.c - p.w3 / (q * v + p.D3));
            break;
        }
    }
    return J;
}

}  // namespace ecodamp
