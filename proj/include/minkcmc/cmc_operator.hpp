#pragma once

// Discrete constant-mean-curvature graph operator on uniform grids,
// second-order central differences throughout. For a spacelike graph u the
// residual is
//
//   L_H(u) = (1 - |Du|^2) sum_i D_ii u + sum_ij D_i u D_j u D_ij u
//            - n H (1 - |Du|^2)^{3/2},
//
// and the mean curvature of the graph is L_H(u) / (n (1-|Du|^2)^{3/2}) + H,
// i.e. H is recovered where the residual vanishes.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "minkcmc/grid.hpp"

namespace minkcmc {

namespace stencil {

// First and second differences at an interior node of a 1-D lattice.
struct Derivs1 {
    double g, A;
};
inline Derivs1 derivs1(const std::vector<double>& u, std::size_t i, double h) {
    return {(u[i + 1] - u[i - 1]) / (2.0 * h),
            (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h)};
}

struct Derivs2 {
    double g1, g2;   // D1 u, D2 u
    double A, B, C;  // D11 u, D22 u, D12 u
};
inline Derivs2 derivs2(const GridDomain& gr, const std::vector<double>& u,
                       std::size_t i, std::size_t j) {
    const double h = gr.spacing();
    const double uc = u[gr.index(i, j)];
    const double ue = u[gr.index(i + 1, j)], uw = u[gr.index(i - 1, j)];
    const double un = u[gr.index(i, j + 1)], us = u[gr.index(i, j - 1)];
    Derivs2 d;
    d.g1 = (ue - uw) / (2.0 * h);
    d.g2 = (un - us) / (2.0 * h);
    d.A = (ue - 2.0 * uc + uw) / (h * h);
    d.B = (un - 2.0 * uc + us) / (h * h);
    d.C = (u[gr.index(i + 1, j + 1)] + u[gr.index(i - 1, j - 1)] -
           u[gr.index(i + 1, j - 1)] - u[gr.index(i - 1, j + 1)]) /
          (4.0 * h * h);
    return d;
}

}  // namespace stencil

// Max over interior nodes of |Du|^2 (central differences).
inline double max_slope_sq(const GridDomain& gr, const std::vector<double>& u) {
    const std::size_t N = gr.axis_nodes();
    double worst = 0.0;
    if (gr.dimension() == 1) {
        for (std::size_t i = 1; i + 1 < N; ++i) {
            const double g = (u[i + 1] - u[i - 1]) / (2.0 * gr.spacing());
            worst = std::max(worst, g * g);
        }
    } else {
        for (std::size_t j = 1; j + 1 < N; ++j)
            for (std::size_t i = 1; i + 1 < N; ++i) {
                const auto d = stencil::derivs2(gr, u, i, j);
                worst = std::max(worst, d.g1 * d.g1 + d.g2 * d.g2);
            }
    }
    return worst;
}

inline void require_spacelike(const GridDomain& gr, const std::vector<double>& u,
                              const char* what) {
    if (max_slope_sq(gr, u) >= 1.0)
        throw slope_violation(std::string(what) + ": |Du| >= 1 at an interior node");
}

// L_H(u) on interior nodes, in lattice order (boundary nodes keep 0).
inline std::vector<double> cmc_residual_field(const SpacelikeGraph& g, double H) {
    const GridDomain& gr = g.grid;
    require_spacelike(gr, g.u, "cmc residual");
    const std::size_t N = gr.axis_nodes();
    std::vector<double> r(gr.node_count(), 0.0);
    const double n = double(gr.dimension());
    if (gr.dimension() == 1) {
        for (std::size_t i = 1; i + 1 < N; ++i) {
            const auto d = stencil::derivs1(g.u, i, gr.spacing());
            const double s = 1.0 - d.g * d.g;
            r[i] = d.A - n * H * s * std::sqrt(s);
        }
    } else {
        for (std::size_t j = 1; j + 1 < N; ++j)
            for (std::size_t i = 1; i + 1 < N; ++i) {
                const auto d = stencil::derivs2(gr, g.u, i, j);
                const double s = 1.0 - d.g1 * d.g1 - d.g2 * d.g2;
                r[gr.index(i, j)] = s * (d.A + d.B) + d.g1 * d.g1 * d.A +
                                    d.g2 * d.g2 * d.B + 2.0 * d.g1 * d.g2 * d.C -
                                    n * H * s * std::sqrt(s);
            }
    }
    return r;
}

// Pointwise mean curvature of the graph on interior nodes.
inline std::vector<double> mean_curvature_field(const SpacelikeGraph& g) {
    const GridDomain& gr = g.grid;
    require_spacelike(gr, g.u, "mean curvature");
    const std::size_t N = gr.axis_nodes();
    std::vector<double> Hf(gr.node_count(), 0.0);
    const double n = double(gr.dimension());
    if (gr.dimension() == 1) {
        for (std::size_t i = 1; i + 1 < N; ++i) {
            const auto d = stencil::derivs1(g.u, i, gr.spacing());
            const double s = 1.0 - d.g * d.g;
            Hf[i] = (d.A / std::sqrt(s) + d.g * d.g * d.A / (s * std::sqrt(s))) / n;
        }
    } else {
        for (std::size_t j = 1; j + 1 < N; ++j)
            for (std::size_t i = 1; i + 1 < N; ++i) {
                const auto d = stencil::derivs2(gr, g.u, i, j);
                const double s = 1.0 - d.g1 * d.g1 - d.g2 * d.g2;
                const double quad = d.g1 * d.g1 * d.A + 2.0 * d.g1 * d.g2 * d.C +
                                    d.g2 * d.g2 * d.B;
                Hf[gr.index(i, j)] = ((d.A + d.B) / std::sqrt(s) + quad / (s * std::sqrt(s))) / n;
            }
    }
    return Hf;
}

inline double max_abs_interior(const GridDomain& gr, const std::vector<double>& f) {
    const std::size_t N = gr.axis_nodes();
    double m = 0.0;
    if (gr.dimension() == 1) {
        for (std::size_t i = 1; i + 1 < N; ++i) m = std::max(m, std::abs(f[i]));
    } else {
        for (std::size_t j = 1; j + 1 < N; ++j)
            for (std::size_t i = 1; i + 1 < N; ++i)
                m = std::max(m, std::abs(f[gr.index(i, j)]));
    }
    return m;
}

}  // namespace minkcmc
