#pragma once

// Damped Newton solver for the discrete CMC Dirichlet problem, the
// growing-box scheme for entire hypersurfaces, and CMC foliations.
//
// Boxes carry the cosmological level set v_{1/H} as Dirichlet data: it is a
// supersolution, so successive restrictions to the fixed window decrease
// monotonically and their stabilization is the stopping criterion.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "minkcmc/cmc_operator.hpp"
#include "minkcmc/regular_domain.hpp"

namespace minkcmc {

struct newton_diverged : solver_error {
    using solver_error::solver_error;
};
struct no_stabilization : solver_error {
    using solver_error::solver_error;
};
struct ordering_violation : solver_error {
    using solver_error::solver_error;
};

struct SolverOptions {
    double tol_newton = 1e-10;       // absolute max-norm residual target
    double eps_slope = 1e-3;         // spacelike margin: |Du| <= 1 - eps_slope
    int max_iter = 60;
    int max_boxes = 6;               // doublings tried by solve_entire
    double stabilization_tol = 1e-4;
    std::size_t max_unknowns = 4'000'000;
    std::function<void(const std::string&)> log;  // per-iteration lines
};

namespace detail {

inline void log_line(const SolverOptions& opt, int iter, double res, double step) {
    if (!opt.log) return;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "iter=%d res=%.6e step=%.4g", iter, res, step);
    opt.log(buf);
}

// Newton linear systems: direct LU below `kDirectLimit` unknowns, ILUT-
// preconditioned BiCGSTAB above. Both are driven to relative residual 1e-12.
inline constexpr std::size_t kDirectLimit = 200'000;

class NewtonLinearSolver {
  public:
    explicit NewtonLinearSolver(std::size_t unknowns) : direct_(unknowns <= kDirectLimit) {}

    Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs) {
        if (direct_) {
            if (!analyzed_) {
                lu_.analyzePattern(J);
                analyzed_ = true;
            }
            lu_.factorize(J);
            if (lu_.info() != Eigen::Success)
                throw newton_diverged("newton: singular Jacobian in LU factorization");
            return lu_.solve(rhs);
        }
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
        it.setTolerance(1e-12);
        it.setMaxIterations(2000);
        it.compute(J);
        Eigen::VectorXd x = it.solve(rhs);
        if (it.info() != Eigen::Success)
            throw newton_diverged("newton: iterative linear solve failed to reach tolerance");
        return x;
    }

  private:
    bool direct_;
    bool analyzed_ = false;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

struct Discretization {
    const GridDomain& gr;
    std::vector<std::ptrdiff_t> eq_of_node;  // -1 on boundary nodes
    std::vector<std::size_t> node_of_eq;

    explicit Discretization(const GridDomain& g) : gr(g) {
        const std::size_t N = g.axis_nodes();
        eq_of_node.assign(g.node_count(), -1);
        if (g.dimension() == 1) {
            for (std::size_t i = 1; i + 1 < N; ++i) {
                eq_of_node[i] = std::ptrdiff_t(node_of_eq.size());
                node_of_eq.push_back(i);
            }
        } else {
            for (std::size_t j = 1; j + 1 < N; ++j)
                for (std::size_t i = 1; i + 1 < N; ++i) {
                    eq_of_node[g.index(i, j)] = std::ptrdiff_t(node_of_eq.size());
                    node_of_eq.push_back(g.index(i, j));
                }
        }
    }
};

inline double residual_max_norm(const GridDomain& gr, const std::vector<double>& u, double H) {
    SpacelikeGraph tmp{gr, u, H, 0.0, 0.0};
    return max_abs_interior(gr, cmc_residual_field(tmp, H));
}

inline void assemble(const Discretization& dis, const std::vector<double>& u, double H,
                     Eigen::VectorXd& F, Eigen::SparseMatrix<double>& J) {
    const GridDomain& gr = dis.gr;
    const double h = gr.spacing();
    const std::size_t m = dis.node_of_eq.size();
    F.resize(Eigen::Index(m));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(m * (gr.dimension() == 1 ? 3 : 9));

    auto add = [&](std::size_t row, std::size_t node, double val) {
        const std::ptrdiff_t col = dis.eq_of_node[node];
        if (col >= 0) trip.emplace_back(int(row), int(col), val);
    };

    const std::size_t N = gr.axis_nodes();
    if (gr.dimension() == 1) {
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t i = dis.node_of_eq[r];
            const auto d = stencil::derivs1(u, i, h);
            const double s = 1.0 - d.g * d.g;
            F[Eigen::Index(r)] = d.A - H * s * std::sqrt(s);
            const double dFdg = 3.0 * H * d.g * std::sqrt(s);
            add(r, i + 1, 1.0 / (h * h) + dFdg / (2.0 * h));
            add(r, i - 1, 1.0 / (h * h) - dFdg / (2.0 * h));
            add(r, i, -2.0 / (h * h));
        }
    } else {
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t node = dis.node_of_eq[r];
            const std::size_t j = node / N, i = node % N;
            const auto d = stencil::derivs2(gr, u, i, j);
            const double s = 1.0 - d.g1 * d.g1 - d.g2 * d.g2;
            F[Eigen::Index(r)] = s * (d.A + d.B) + d.g1 * d.g1 * d.A + d.g2 * d.g2 * d.B +
                                 2.0 * d.g1 * d.g2 * d.C - 2.0 * H * s * std::sqrt(s);
            const double dFdg1 = -2.0 * d.g1 * d.B + 2.0 * d.g2 * d.C + 6.0 * H * d.g1 * std::sqrt(s);
            const double dFdg2 = -2.0 * d.g2 * d.A + 2.0 * d.g1 * d.C + 6.0 * H * d.g2 * std::sqrt(s);
            const double dFdA = s + d.g1 * d.g1;
            const double dFdB = s + d.g2 * d.g2;
            const double dFdC = 2.0 * d.g1 * d.g2;
            add(r, gr.index(i + 1, j), dFdA / (h * h) + dFdg1 / (2.0 * h));
            add(r, gr.index(i - 1, j), dFdA / (h * h) - dFdg1 / (2.0 * h));
            add(r, gr.index(i, j + 1), dFdB / (h * h) + dFdg2 / (2.0 * h));
            add(r, gr.index(i, j - 1), dFdB / (h * h) - dFdg2 / (2.0 * h));
            add(r, node, -2.0 * (dFdA + dFdB) / (h * h));
            add(r, gr.index(i + 1, j + 1), dFdC / (4.0 * h * h));
            add(r, gr.index(i - 1, j - 1), dFdC / (4.0 * h * h));
            add(r, gr.index(i + 1, j - 1), -dFdC / (4.0 * h * h));
            add(r, gr.index(i - 1, j + 1), -dFdC / (4.0 * h * h));
        }
    }
    J.resize(Eigen::Index(m), Eigen::Index(m));
    J.setFromTriplets(trip.begin(), trip.end());
}

}  // namespace detail

// Dirichlet solve of L_H(u) = 0 on the box. `boundary` supplies values at
// boundary nodes (interior entries ignored); they must stay between the
// horizon and the level set v_{1/H}, and be strictly 1-Lipschitz along the
// boundary. The initial iterate is v_{1/(2H)} clamped between the barriers.
inline SpacelikeGraph solve_dirichlet(const RegularDomainModel& D, const GridDomain& grid,
                                      double H, const std::vector<double>& boundary,
                                      const SolverOptions& opt = {}) {
    if (!(H > 0.0)) throw input_error("solve: H must be positive");
    if (boundary.size() != grid.node_count())
        throw input_error("solve: boundary array has wrong size");
    if (D.dimension() != grid.dimension())
        throw input_error("solve: domain and grid dimension mismatch");

    const std::size_t N = grid.axis_nodes();
    const double a_top = 1.0 / H;

    // Precondition: boundary data sandwiched between the barriers.
    auto check_node = [&](std::size_t i, std::size_t j) {
        const auto x = grid.point(i, j);
        const double lo = D.horizon_height(x);
        const double hi = D.level_set_height(a_top, x);
        const double b = boundary[grid.index(i, j)];
        const double slack = 1e-10 * (1.0 + std::abs(hi));
        if (b < lo - slack || b > hi + slack)
            throw input_error("solve: boundary value escapes the barrier interval [v0, v_{1/H}]");
    };
    if (grid.dimension() == 1) {
        check_node(0, 0);
        check_node(N - 1, 0);
    } else {
        for (std::size_t i = 0; i < N; ++i) {
            check_node(i, 0);
            check_node(i, N - 1);
            check_node(0, i);
            check_node(N - 1, i);
        }
        // Slope compatibility along the boundary circuit.
        auto diff_ok = [&](std::size_t a, std::size_t b) {
            if (std::abs(boundary[a] - boundary[b]) >= grid.spacing())
                throw input_error("solve: boundary data not strictly 1-Lipschitz along the box edge");
        };
        for (std::size_t i = 0; i + 1 < N; ++i) {
            diff_ok(grid.index(i, 0), grid.index(i + 1, 0));
            diff_ok(grid.index(i, N - 1), grid.index(i + 1, N - 1));
            diff_ok(grid.index(0, i), grid.index(0, i + 1));
            diff_ok(grid.index(N - 1, i), grid.index(N - 1, i + 1));
        }
    }

    // Initial iterate: the supersolution level set v_{1/H}, corrected by a
    // transfinite interpolation of the boundary mismatch so that the iterate
    // meets the Dirichlet data without a steep layer. For the growing-box
    // scheme the data is v_{1/H} itself and the correction vanishes.
    std::vector<double> u = grid.sample(
        [&](const std::vector<double>& x) { return D.level_set_height(a_top, x); });
    if (grid.dimension() == 1) {
        const double dl = boundary[0] - u[0], dr = boundary[N - 1] - u[N - 1];
        for (std::size_t i = 0; i < N; ++i) {
            const double xi = double(i) / double(N - 1);
            u[i] += (1.0 - xi) * dl + xi * dr;
        }
    } else {
        std::vector<double> mis(grid.node_count(), 0.0);
        for (std::size_t i = 0; i < N; ++i) {
            mis[grid.index(i, 0)] = boundary[grid.index(i, 0)] - u[grid.index(i, 0)];
            mis[grid.index(i, N - 1)] = boundary[grid.index(i, N - 1)] - u[grid.index(i, N - 1)];
            mis[grid.index(0, i)] = boundary[grid.index(0, i)] - u[grid.index(0, i)];
            mis[grid.index(N - 1, i)] = boundary[grid.index(N - 1, i)] - u[grid.index(N - 1, i)];
        }
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t i = 0; i < N; ++i) {
                const double xi = double(i) / double(N - 1);
                const double eta = double(j) / double(N - 1);
                const double lift =
                    (1.0 - xi) * mis[grid.index(0, j)] + xi * mis[grid.index(N - 1, j)] +
                    (1.0 - eta) * mis[grid.index(i, 0)] + eta * mis[grid.index(i, N - 1)] -
                    (1.0 - xi) * (1.0 - eta) * mis[grid.index(0, 0)] -
                    xi * (1.0 - eta) * mis[grid.index(N - 1, 0)] -
                    (1.0 - xi) * eta * mis[grid.index(0, N - 1)] -
                    xi * eta * mis[grid.index(N - 1, N - 1)];
                u[grid.index(i, j)] += lift;
            }
    }
    // Pin the boundary rows to the data exactly.
    if (grid.dimension() == 1) {
        u[0] = boundary[0];
        u[N - 1] = boundary[N - 1];
    } else {
        for (std::size_t i = 0; i < N; ++i) {
            u[grid.index(i, 0)] = boundary[grid.index(i, 0)];
            u[grid.index(i, N - 1)] = boundary[grid.index(i, N - 1)];
            u[grid.index(0, i)] = boundary[grid.index(0, i)];
            u[grid.index(N - 1, i)] = boundary[grid.index(N - 1, i)];
        }
    }

    detail::Discretization dis(grid);
    detail::NewtonLinearSolver linear(dis.node_of_eq.size());
    const double slope_cap = (1.0 - opt.eps_slope) * (1.0 - opt.eps_slope);

    if (max_slope_sq(grid, u) > slope_cap)
        throw slope_violation("solve: initial iterate violates the slope margin");

    Eigen::VectorXd F;
    Eigen::SparseMatrix<double> J;
    double res = detail::residual_max_norm(grid, u, H);
    std::vector<double> damping_history;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        if (res <= opt.tol_newton) break;
        detail::assemble(dis, u, H, F, J);
        Eigen::VectorXd delta = linear.solve(J, -F);

        double step = 1.0;
        std::vector<double> trial(u.size());
        double trial_res = 0.0;
        bool accepted = false;
        for (int back = 0; back < 50; ++back) {
            trial = u;
            for (std::size_t r = 0; r < dis.node_of_eq.size(); ++r)
                trial[dis.node_of_eq[r]] += step * delta[Eigen::Index(r)];
            if (max_slope_sq(grid, trial) > slope_cap) {
                step *= 0.5;
                continue;  // slope guard
            }
            trial_res = detail::residual_max_norm(grid, trial, H);
            if (trial_res <= (1.0 - 1e-4 * step) * res) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (max_slope_sq(grid, u) > slope_cap)
                throw slope_violation("solve: line search cannot restore the slope margin");
            std::ostringstream msg;
            msg << "newton: line search stalled at iter " << iter << ", residual " << res
                << ", damping history:";
            for (double d : damping_history) msg << ' ' << d;
            throw newton_diverged(msg.str());
        }
        u.swap(trial);
        res = trial_res;
        damping_history.push_back(step);
        detail::log_line(opt, iter + 1, res, step);
    }

    if (res > opt.tol_newton) {
        std::ostringstream msg;
        msg << "newton: no convergence after " << opt.max_iter << " iterations, residual " << res
            << ", damping history:";
        for (double d : damping_history) msg << ' ' << d;
        throw newton_diverged(msg.str());
    }

    return SpacelikeGraph{grid, std::move(u), H, res, opt.eps_slope};
}

// Largest violation of the barrier sandwich v0 <= u <= v_{1/H}; zero when the
// sandwich holds at every node.
inline double barrier_violation(const RegularDomainModel& D, const SpacelikeGraph& g) {
    const GridDomain& gr = g.grid;
    const std::size_t N = gr.axis_nodes();
    const double a_top = 1.0 / g.H_target;
    double worst = 0.0;
    for (std::size_t j = 0; j < (gr.dimension() == 1 ? 1 : N); ++j)
        for (std::size_t i = 0; i < N; ++i) {
            const auto x = gr.point(i, j);
            const double ui = g.u[gr.index(i, j)];
            worst = std::max(worst, D.horizon_height(x) - ui);
            worst = std::max(worst, ui - D.level_set_height(a_top, x));
        }
    return worst;
}

struct EntireSolveReport {
    std::vector<double> window_diffs;   // max-norm gap between successive restrictions
    double monotonicity_excess = 0.0;   // max positive increase (should be ~0)
    int boxes_used = 0;
};

// Entire-hypersurface approximation on `window`: Dirichlet solves on boxes of
// half-width R * 2^k with v_{1/H} boundary data, stopping when the window
// restriction stabilizes.
inline SpacelikeGraph solve_entire(const RegularDomainModel& D, double H,
                                   const GridDomain& window, const SolverOptions& opt = {},
                                   EntireSolveReport* report = nullptr) {
    if (!(H > 0.0)) throw input_error("solve: H must be positive");
    const double h = window.spacing();
    const std::size_t Nw = window.axis_nodes();
    const double a_top = 1.0 / H;

    std::vector<double> prev;  // previous window restriction
    SpacelikeGraph out{window, {}, H, 0.0, opt.eps_slope};
    EntireSolveReport rep;

    for (int k = 0; k <= opt.max_boxes; ++k) {
        const double Rk = window.half_width() * std::pow(2.0, k);
        GridDomain box(window.dimension(), Rk, h);
        if (box.node_count() > opt.max_unknowns)
            throw no_stabilization("solve: window restriction still moving when the box budget ran out");

        std::vector<double> bdata(box.node_count(), 0.0);
        const std::size_t Nb = box.axis_nodes();
        auto set_bd = [&](std::size_t i, std::size_t j) {
            bdata[box.index(i, j)] = D.level_set_height(a_top, box.point(i, j));
        };
        if (box.dimension() == 1) {
            set_bd(0, 0);
            set_bd(Nb - 1, 0);
        } else {
            for (std::size_t i = 0; i < Nb; ++i) {
                set_bd(i, 0);
                set_bd(i, Nb - 1);
                set_bd(0, i);
                set_bd(Nb - 1, i);
            }
        }

        SpacelikeGraph solved = solve_dirichlet(D, box, H, bdata, opt);
        rep.boxes_used = k + 1;

        // Restrict to the window (node-aligned by construction).
        const std::size_t off = (Nb - Nw) / 2;
        std::vector<double> restr(window.node_count());
        if (window.dimension() == 1) {
            for (std::size_t i = 0; i < Nw; ++i) restr[i] = solved.u[off + i];
        } else {
            for (std::size_t j = 0; j < Nw; ++j)
                for (std::size_t i = 0; i < Nw; ++i)
                    restr[window.index(i, j)] = solved.u[box.index(off + i, off + j)];
        }

        if (!prev.empty()) {
            double diff = 0.0, rise = 0.0;
            for (std::size_t t = 0; t < restr.size(); ++t) {
                diff = std::max(diff, std::abs(restr[t] - prev[t]));
                rise = std::max(rise, restr[t] - prev[t]);
            }
            rep.window_diffs.push_back(diff);
            rep.monotonicity_excess = std::max(rep.monotonicity_excess, rise);
            if (diff <= opt.stabilization_tol) {
                out.u = std::move(restr);
                out.residual_norm = detail::residual_max_norm(window, out.u, H);
                if (report) *report = rep;
                return out;
            }
        }
        prev = std::move(restr);
    }
    throw no_stabilization("solve: window restriction did not settle within the box budget");
}

inline SpacelikeGraph solve_entire(const SupportFunction& sf, double H, const GridDomain& window,
                                   const SolverOptions& opt = {}, EntireSolveReport* report = nullptr) {
    RegularDomainModel D(sf);
    return solve_entire(D, H, window, opt, report);
}

struct FoliationLeaf {
    double H;
    SpacelikeGraph graph;
};

struct FoliationResult {
    SupportFunction support;
    std::vector<FoliationLeaf> leaves;     // ordered by increasing H
    std::vector<double> adjacent_min_gap;  // min over interior nodes of u_{H_i} - u_{H_{i+1}}
};

// Bracketing leaves around a probe point: the leaf below the point carries
// the larger mean curvature.
struct ProbeBracket {
    double H_below;
    double H_above;
};

inline FoliationResult foliate(const SupportFunction& sf, const std::vector<double>& H_list,
                               const GridDomain& window, const SolverOptions& opt = {}) {
    if (H_list.size() < 2) throw input_error("foliate: need at least two H values");
    for (std::size_t i = 0; i < H_list.size(); ++i) {
        if (!(H_list[i] > 0.0)) throw input_error("foliate: H values must be positive");
        if (i > 0 && !(H_list[i] > H_list[i - 1]))
            throw input_error("foliate: H values must be strictly increasing");
    }
    RegularDomainModel D(sf);
    FoliationResult fol{sf, {}, {}};
    for (double H : H_list) fol.leaves.push_back({H, solve_entire(D, H, window, opt)});

    const GridDomain& gr = window;
    const std::size_t N = gr.axis_nodes();
    for (std::size_t l = 0; l + 1 < fol.leaves.size(); ++l) {
        const auto& hi = fol.leaves[l].graph.u;       // smaller H, higher surface
        const auto& lo = fol.leaves[l + 1].graph.u;   // larger H, lower surface
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < (gr.dimension() == 1 ? 1 : N); ++j)
            for (std::size_t i = 0; i < N; ++i) {
                if (!gr.is_interior(i, j)) continue;
                min_gap = std::min(min_gap, hi[gr.index(i, j)] - lo[gr.index(i, j)]);
            }
        if (min_gap < -10.0 * opt.stabilization_tol) {
            std::ostringstream msg;
            msg << "foliate: leaves H=" << fol.leaves[l].H << " and H=" << fol.leaves[l + 1].H
                << " violate monotone ordering by " << -min_gap;
            throw ordering_violation(msg.str());
        }
        fol.adjacent_min_gap.push_back(min_gap);
    }
    return fol;
}

inline std::optional<ProbeBracket> probe_bracket(const FoliationResult& fol, const MinkVector& p) {
    std::vector<double> heights;
    heights.reserve(fol.leaves.size());
    for (const auto& leaf : fol.leaves) heights.push_back(interpolate(leaf.graph, p.spatial));
    // heights decrease as H increases
    for (std::size_t i = 0; i + 1 < heights.size(); ++i) {
        if (heights[i + 1] <= p.time && p.time <= heights[i])
            return ProbeBracket{fol.leaves[i + 1].H, fol.leaves[i].H};
    }
    return std::nullopt;
}

}  // namespace minkcmc
