#pragma once

// Regular domains generated by finitely sampled null support functions.
//
// The past horizon is the graph of v0(x) = max_i <theta_i, x> - phi_i, a
// convex 1-Lipschitz polyhedral function whose faces are pieces of null
// hyperplanes. Along a face the Lorentzian distance to a fixed interior
// point strictly increases toward the face's past-directed boundary, so the
// cosmological time T(p) = d(horizon, p) is always attained on the edge
// skeleton of the horizon. Restricted to an edge the squared distance is a
// concave quadratic, which gives closed-form evaluation of T. The level-set
// height v_a(x) (the unique s with T((x,s)) = a) is the inf-convolution of
// v0 with y -> sqrt(a^2 + |y|^2); the same skeleton argument applies and the
// per-edge minimizer is again explicit. Both evaluators are exact up to
// rounding, with cost linear in the number of surviving edges.

#include <cmath>
#include <limits>
#include <vector>

#include "minkcmc/support_function.hpp"

namespace minkcmc {

struct not_in_domain : input_error {
    using input_error::input_error;
};

class RegularDomainModel {
  public:
    explicit RegularDomainModel(SupportFunction sf) : sf_(std::move(sf)) {
        if (sf_.dimension == 1) {
            build_1d();
        } else if (sf_.dimension == 2) {
            build_2d();
        } else {
            throw input_error("regular domain: evaluators support n in {1, 2}");
        }
    }

    const SupportFunction& support() const { return sf_; }
    std::size_t dimension() const { return sf_.dimension; }

    // v0(x), the height of the past horizon over x.
    double horizon_height(const std::vector<double>& x) const {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& s : sf_.samples)
            best = std::max(best, detail::dot(s.direction, x) - s.value);
        return best;
    }

    bool contains(const MinkVector& p) const {
        return p.time > horizon_height(p.spatial);
    }

    // Cosmological time T(p) = d(horizon, p), for p strictly inside the domain.
    double cosmological_time(const MinkVector& p) const {
        if (p.dim() != sf_.dimension)
            throw input_error("cosmological time: point dimension mismatch");
        if (!contains(p)) throw not_in_domain("cosmological time: point not inside the domain");
        if (sf_.dimension == 1) {
            const double dt = p.time - vertex_t_, dx = p.spatial[0] - vertex_x_;
            return std::sqrt(std::max(0.0, dt * dt - dx * dx));
        }
        double best = 0.0;
        for (const auto& e : edges_) {
            // Squared distance along the edge: concave quadratic in tau.
            const double P = p.time - e.c0;
            const double wx = p.spatial[0] - e.x0, wy = p.spatial[1] - e.y0;
            const double wd = wx * e.dx + wy * e.dy;
            const double A = e.c1 * e.c1 - 1.0;
            const double B = 2.0 * (wd - P * e.c1);
            const double C = P * P - (wx * wx + wy * wy);
            double tau = -B / (2.0 * A);
            tau = std::min(std::max(tau, e.tau_min), e.tau_max);
            best = std::max(best, (A * tau + B) * tau + C);
        }
        return std::sqrt(std::max(0.0, best));
    }

    // v_a(x): height of the level set T = a over x. Exceeds v0(x) by at most a.
    double level_set_height(double a, const std::vector<double>& x) const {
        if (!(a > 0.0)) throw input_error("level set: level must be positive");
        if (x.size() != sf_.dimension)
            throw input_error("level set: point dimension mismatch");
        if (sf_.dimension == 1) {
            const double dx = x[0] - vertex_x_;
            return vertex_t_ + std::sqrt(a * a + dx * dx);
        }
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : edges_) {
            const double wx = x[0] - e.x0, wy = x[1] - e.y0;
            const double wd = wx * e.dx + wy * e.dy;
            const double rho2 = std::max(a * a, a * a + wx * wx + wy * wy - wd * wd);
            // Stationary point of c0 + c1 tau + sqrt(a^2 + |w - tau d|^2).
            double tau = wd - e.c1 * std::sqrt(rho2 / (1.0 - e.c1 * e.c1));
            tau = std::min(std::max(tau, e.tau_min), e.tau_max);
            const double sx = wx - tau * e.dx, sy = wy - tau * e.dy;
            best = std::min(best, e.c0 + e.c1 * tau + std::sqrt(a * a + sx * sx + sy * sy));
        }
        return best;
    }

  private:
    struct Edge {
        double x0, y0;          // a point on the supporting line
        double dx, dy;          // unit direction of the line
        double c0, c1;          // v0 along the line: c0 + c1 tau
        double tau_min, tau_max;
    };

    void build_1d() {
        // Exactly two samples after deduplication: directions +1 and -1.
        double phi_plus = 0.0, phi_minus = 0.0;
        for (const auto& s : sf_.samples)
            (s.direction[0] > 0 ? phi_plus : phi_minus) = s.value;
        vertex_x_ = (phi_plus - phi_minus) / 2.0;
        vertex_t_ = -(phi_plus + phi_minus) / 2.0;
    }

    void build_2d() {
        const auto& S = sf_.samples;
        const std::size_t m = S.size();
        const double inf = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const double mx = S[i].direction[0] - S[j].direction[0];
                const double my = S[i].direction[1] - S[j].direction[1];
                const double m2 = mx * mx + my * my;
                const double rhs = S[i].value - S[j].value;
                Edge e;
                e.x0 = mx * rhs / m2;
                e.y0 = my * rhs / m2;
                const double dn = std::sqrt(m2);
                e.dx = -my / dn;
                e.dy = mx / dn;
                e.c0 = S[i].direction[0] * e.x0 + S[i].direction[1] * e.y0 - S[i].value;
                e.c1 = S[i].direction[0] * e.dx + S[i].direction[1] * e.dy;
                e.tau_min = -inf;
                e.tau_max = inf;
                bool empty = false;
                for (std::size_t k = 0; k < m && !empty; ++k) {
                    if (k == i || k == j) continue;
                    // Piece i must dominate piece k on the edge: a + b tau >= 0.
                    const double a = (S[i].direction[0] - S[k].direction[0]) * e.x0 +
                                     (S[i].direction[1] - S[k].direction[1]) * e.y0 -
                                     (S[i].value - S[k].value);
                    const double b = (S[i].direction[0] - S[k].direction[0]) * e.dx +
                                     (S[i].direction[1] - S[k].direction[1]) * e.dy;
                    if (std::abs(b) <= 1e-14) {
                        if (a < -1e-12 * (1.0 + std::abs(a))) empty = true;
                    } else if (b > 0.0) {
                        e.tau_min = std::max(e.tau_min, -a / b);
                    } else {
                        e.tau_max = std::min(e.tau_max, -a / b);
                    }
                }
                if (!empty && e.tau_min <= e.tau_max) edges_.push_back(e);
            }
        }
        if (edges_.empty())
            throw input_error("regular domain: degenerate support samples (no horizon edges)");
    }

    SupportFunction sf_;
    std::vector<Edge> edges_;     // n = 2
    double vertex_x_ = 0.0;       // n = 1
    double vertex_t_ = 0.0;
};

}  // namespace minkcmc
