#pragma once

// Minkowski R^{n,1} linear algebra: signature (+,...,+,-), vectors stored as
// n spatial components plus one time component.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace minkcmc {

struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MinkVector {
    std::vector<double> spatial;
    double time = 0.0;

    MinkVector() = default;
    MinkVector(std::vector<double> x, double t) : spatial(std::move(x)), time(t) {}

    std::size_t dim() const { return spatial.size(); }

    MinkVector operator-(const MinkVector& o) const {
        check_same_dim(o);
        MinkVector r(spatial, time - o.time);
        for (std::size_t i = 0; i < spatial.size(); ++i) r.spatial[i] -= o.spatial[i];
        return r;
    }
    MinkVector operator+(const MinkVector& o) const {
        check_same_dim(o);
        MinkVector r(spatial, time + o.time);
        for (std::size_t i = 0; i < spatial.size(); ++i) r.spatial[i] += o.spatial[i];
        return r;
    }
    MinkVector operator-() const {
        MinkVector r(spatial, -time);
        for (auto& c : r.spatial) c = -c;
        return r;
    }
    MinkVector operator*(double s) const {
        MinkVector r(spatial, time * s);
        for (auto& c : r.spatial) c *= s;
        return r;
    }

    void check_same_dim(const MinkVector& o) const {
        if (spatial.size() != o.spatial.size())
            throw input_error("MinkVector dimension mismatch");
    }
};

inline MinkVector mink_vector2(double x1, double x2, double t) {
    return MinkVector({x1, x2}, t);
}

enum class CausalClass {
    Spacelike,
    TimelikeFuture,
    TimelikePast,
    NullFuture,
    NullPast,
    Zero,
};

inline double minkowski_inner(const MinkVector& v, const MinkVector& w) {
    v.check_same_dim(w);
    double s = 0.0;
    for (std::size_t i = 0; i < v.spatial.size(); ++i) s += v.spatial[i] * w.spatial[i];
    return s - v.time * w.time;
}

inline double euclidean_norm2(const MinkVector& v) {
    double s = v.time * v.time;
    for (double c : v.spatial) s += c * c;
    return s;
}

// Relative band around zero for null classification; analytically exact null
// vectors classify as null even after a few rounding operations.
inline constexpr double kNullBand = 1e-12;

inline CausalClass causal_class(const MinkVector& v) {
    bool all_zero = v.time == 0.0;
    for (double c : v.spatial)
        if (c != 0.0) all_zero = false;
    if (all_zero) return CausalClass::Zero;

    const double q = minkowski_inner(v, v);
    const double band = kNullBand * std::max(1.0, euclidean_norm2(v));
    if (std::abs(q) <= band)
        return v.time > 0.0 ? CausalClass::NullFuture : CausalClass::NullPast;
    if (q > 0.0) return CausalClass::Spacelike;
    return v.time > 0.0 ? CausalClass::TimelikeFuture : CausalClass::TimelikePast;
}

inline bool is_causal_future(const MinkVector& v) {
    switch (causal_class(v)) {
        case CausalClass::TimelikeFuture:
        case CausalClass::NullFuture:
            return true;
        default:
            return false;
    }
}

// Lorentzian distance d(p,q) = sqrt(-<q-p,q-p>) when q lies in the causal
// future of p. A non-causal pair is a distinguished outcome, not an error.
inline std::optional<double> lorentzian_distance(const MinkVector& p, const MinkVector& q) {
    const MinkVector v = q - p;
    switch (causal_class(v)) {
        case CausalClass::Zero:
            return 0.0;
        case CausalClass::NullFuture:
            return 0.0;
        case CausalClass::TimelikeFuture:
            return std::sqrt(-minkowski_inner(v, v));
        default:
            return std::nullopt;
    }
}

// Boost of rapidity chi along a unit spatial direction e; fixes e^perp and
// maps (x_par, t) -> (cosh chi x_par + sinh chi t, sinh chi x_par + cosh chi t).
inline MinkVector boost(const MinkVector& v, const std::vector<double>& e, double chi) {
    if (e.size() != v.dim()) throw input_error("boost direction dimension mismatch");
    double par = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) par += v.spatial[i] * e[i];
    const double ch = std::cosh(chi), sh = std::sinh(chi);
    const double par_new = ch * par + sh * v.time;
    MinkVector r = v;
    r.time = sh * par + ch * v.time;
    for (std::size_t i = 0; i < e.size(); ++i) r.spatial[i] += (par_new - par) * e[i];
    return r;
}

}  // namespace minkcmc
