#pragma once

// Null support functions phi: S^{n-1} -> R u {+inf}, stored as the finite
// samples only. Each sample (theta, phi(theta)) contributes the future
// half-space { (x,s) : s > <theta,x> - phi(theta) }; the regular domain is
// the intersection over all samples.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "minkcmc/lorentz.hpp"

namespace minkcmc {

struct SupportSample {
    std::vector<double> direction;  // unit vector in S^{n-1}
    double value = 0.0;             // phi(direction), finite
};

enum class SupportPreset { Cone, Wedge, Custom };

struct SupportFunction {
    std::size_t dimension = 0;
    std::vector<SupportSample> samples;
    SupportPreset preset = SupportPreset::Custom;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline bool same_direction(const std::vector<double>& a, const std::vector<double>& b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return d2 <= 1e-24;  // matches the 1e-12 normalization tolerance
}

}  // namespace detail

// Validates and normalizes raw samples. Duplicate directions collapse to the
// lower envelope (minimum value). A regular domain needs at least two
// distinct null support planes; for n = 1 that means both signs present.
inline SupportFunction make_support_function(std::size_t dimension,
                                             std::vector<SupportSample> raw) {
    if (dimension < 1) throw input_error("support: dimension must be >= 1");
    SupportFunction sf;
    sf.dimension = dimension;
    for (auto& s : raw) {
        if (s.direction.size() != dimension)
            throw input_error("support: direction dimension mismatch");
        if (!std::isfinite(s.value)) throw input_error("support: non-finite value");
        const double n = detail::norm(s.direction);
        if (!(n > 0.0) || !std::isfinite(n))
            throw input_error("support: direction must be a nonzero unit vector");
        if (std::abs(n - 1.0) > 1e-6)
            throw input_error("support: direction not of unit length");
        for (auto& c : s.direction) c /= n;

        bool merged = false;
        for (auto& kept : sf.samples) {
            if (detail::same_direction(kept.direction, s.direction)) {
                kept.value = std::min(kept.value, s.value);
                merged = true;
                break;
            }
        }
        if (!merged) sf.samples.push_back(std::move(s));
    }
    if (sf.samples.size() < 2)
        throw input_error("support: fewer than two directions");
    if (dimension == 1) {
        bool plus = false, minus = false;
        for (const auto& s : sf.samples) (s.direction[0] > 0 ? plus : minus) = true;
        if (!plus || !minus)
            throw input_error("support: fewer than two directions (n = 1 needs both signs)");
    }
    return sf;
}

// phi == <theta, apex_x> + apex_t sampled on `count` directions; the regular
// domain is the future cone of the apex (up to sampling of the circle).
inline SupportFunction cone_support(std::size_t dimension, const MinkVector& apex,
                                    std::size_t count = 256) {
    if (apex.dim() != dimension) throw input_error("cone: apex dimension mismatch");
    std::vector<SupportSample> raw;
    if (dimension == 1) {
        raw.push_back({{+1.0}, apex.spatial[0] - apex.time});
        raw.push_back({{-1.0}, -apex.spatial[0] - apex.time});
    } else if (dimension == 2) {
        if (count < 3) throw input_error("cone: need at least 3 directions for n = 2");
        for (std::size_t k = 0; k < count; ++k) {
            const double a = 2.0 * std::numbers::pi * double(k) / double(count);
            std::vector<double> th{std::cos(a), std::sin(a)};
            raw.push_back({th, detail::dot(th, apex.spatial) - apex.time});
        }
    } else {
        throw input_error("cone: preset implemented for n <= 2");
    }
    auto sf = make_support_function(dimension, std::move(raw));
    sf.preset = SupportPreset::Cone;
    return sf;
}

// Exactly two non-parallel null support planes with directions +-axis.
inline SupportFunction wedge_support(std::size_t dimension, std::vector<double> axis,
                                     double offset_plus = 0.0, double offset_minus = 0.0) {
    const double n = detail::norm(axis);
    if (!(n > 0.0)) throw input_error("wedge: axis must be nonzero");
    for (auto& c : axis) c /= n;
    std::vector<double> neg = axis;
    for (auto& c : neg) c = -c;
    auto sf = make_support_function(
        dimension, {{axis, offset_plus}, {neg, offset_minus}});
    sf.preset = SupportPreset::Wedge;
    return sf;
}

// The asymptotic cut at future null infinity is the graph of -phi on the
// sampled directions (absent directions stay absent).
inline std::vector<SupportSample> null_cut(const SupportFunction& sf) {
    std::vector<SupportSample> cut = sf.samples;
    for (auto& s : cut) s.value = -s.value;
    return cut;
}

}  // namespace minkcmc
