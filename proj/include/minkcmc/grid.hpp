#pragma once

// Uniform node lattices over [-R, R]^n for n in {1, 2}, and spacelike graphs
// sampled on them.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "minkcmc/lorentz.hpp"

namespace minkcmc {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct slope_violation : solver_error {
    using solver_error::solver_error;
};

class GridDomain {
  public:
    GridDomain(std::size_t dimension, double half_width, double spacing)
        : n_(dimension), R_(half_width), h_(spacing) {
        if (n_ != 1 && n_ != 2) throw input_error("grid: dimension must be 1 or 2");
        if (!(h_ > 0.0)) throw input_error("grid: spacing must be positive");
        const double steps = R_ / h_;
        const double k = std::round(steps);
        if (std::abs(steps - k) > 1e-9 * std::max(1.0, steps))
            throw input_error("grid: half-width must be an integer multiple of the spacing");
        half_steps_ = static_cast<std::size_t>(k);
        if (axis_nodes() < 5) throw input_error("grid: fewer than 5 nodes per axis");
    }

    std::size_t dimension() const { return n_; }
    double half_width() const { return R_; }
    double spacing() const { return h_; }
    std::size_t axis_nodes() const { return 2 * half_steps_ + 1; }
    std::size_t node_count() const {
        return n_ == 1 ? axis_nodes() : axis_nodes() * axis_nodes();
    }

    double coord(std::size_t i) const { return -R_ + double(i) * h_; }

    // Flattened index; for n = 2 the fast axis is x1.
    std::size_t index(std::size_t i, std::size_t j = 0) const {
        return j * axis_nodes() + i;
    }

    bool is_interior(std::size_t i, std::size_t j = 0) const {
        const std::size_t N = axis_nodes();
        if (n_ == 1) return i >= 1 && i + 1 < N;
        return i >= 1 && i + 1 < N && j >= 1 && j + 1 < N;
    }

    std::vector<double> point(std::size_t i, std::size_t j = 0) const {
        if (n_ == 1) return {coord(i)};
        return {coord(i), coord(j)};
    }

    std::vector<double> sample(const std::function<double(const std::vector<double>&)>& f) const {
        std::vector<double> u(node_count());
        const std::size_t N = axis_nodes();
        if (n_ == 1) {
            for (std::size_t i = 0; i < N; ++i) u[i] = f({coord(i)});
        } else {
            for (std::size_t j = 0; j < N; ++j)
                for (std::size_t i = 0; i < N; ++i) u[index(i, j)] = f({coord(i), coord(j)});
        }
        return u;
    }

    bool operator==(const GridDomain& o) const {
        return n_ == o.n_ && half_steps_ == o.half_steps_ && h_ == o.h_;
    }

  private:
    std::size_t n_;
    double R_, h_;
    std::size_t half_steps_;
};

struct SpacelikeGraph {
    GridDomain grid;
    std::vector<double> u;        // one height per node
    double H_target = 0.0;
    double residual_norm = 0.0;   // max-norm of the discrete CMC residual
    double slope_margin = 0.0;    // eps_s: |Du| <= 1 - eps_s certified on solves
};

// Bilinear (linear for n = 1) interpolation of the graph height at an
// off-lattice point inside the window.
inline double interpolate(const SpacelikeGraph& g, const std::vector<double>& x) {
    const GridDomain& gr = g.grid;
    const double R = gr.half_width(), h = gr.spacing();
    const std::size_t N = gr.axis_nodes();
    auto locate = [&](double c) {
        double s = (c + R) / h;
        if (s < 0.0 || s > double(N - 1) + 1e-9)
            throw input_error("interpolate: point outside the window");
        std::size_t i0 = static_cast<std::size_t>(std::min(double(N - 2), std::floor(s)));
        return std::pair<std::size_t, double>(i0, s - double(i0));
    };
    if (gr.dimension() == 1) {
        auto [i0, t] = locate(x.at(0));
        return (1.0 - t) * g.u[i0] + t * g.u[i0 + 1];
    }
    auto [i0, tx] = locate(x.at(0));
    auto [j0, ty] = locate(x.at(1));
    const double u00 = g.u[gr.index(i0, j0)], u10 = g.u[gr.index(i0 + 1, j0)];
    const double u01 = g.u[gr.index(i0, j0 + 1)], u11 = g.u[gr.index(i0 + 1, j0 + 1)];
    return (1.0 - ty) * ((1.0 - tx) * u00 + tx * u10) + ty * ((1.0 - tx) * u01 + tx * u11);
}

}  // namespace minkcmc
