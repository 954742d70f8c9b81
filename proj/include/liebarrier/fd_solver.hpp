#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <locale>
#include <ostream>
#include <span>
#include <vector>

#include "liebarrier/errors.hpp"
#include "liebarrier/market.hpp"
#include "liebarrier/pricer.hpp"
#include "liebarrier/transform.hpp"

namespace liebarrier {

struct GridSpec {
    double xi_max = 4.0;  ///< domain width in the moving frame
    int n_space = 800;    ///< space cells
    int n_time = 800;     ///< time steps

    void validate() const {
        if (!(xi_max > 0.0)) throw InvalidParameter("xi_max must be > 0");
        if (n_space < 16) throw InvalidParameter("n_space must be >= 16");
        if (n_time < 16) throw InvalidParameter("n_time must be >= 16");
    }
};

namespace detail {

// Thomas algorithm for a tridiagonal system; sub/sup have length n-1.
inline void solve_tridiagonal(std::vector<double>& sub, std::vector<double>& diag,
                              std::vector<double>& sup, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i - 1] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    }
}

}  // namespace detail

/// Finite-difference solution of the barrier problem in the moving frame.
///
/// Frame choice: with xi = x + (2 alpha + 1) t the transformed barrier line
/// x = -(2 alpha + 1) t becomes the fixed edge xi = 0. Chain rule, writing
/// v(xi, t) = u(x, t):  u_t = v_t + (2 alpha + 1) v_xi and u_xx = v_xixi,
/// so u_t = u_xx turns into the advection-diffusion equation
///   v_t = v_xixi - (2 alpha + 1) v_xi
/// on xi in [0, xi_max], with v(0, t) = 0 pinned and the transplanted
/// no-arbitrage asymptote V ~ S - K e^{-r(T-p)} as the far-field Dirichlet
/// datum. In this frame the closed form reads
///   v*(xi, t) = e^{alpha xi - alpha (alpha+1) t} expm1(xi).
class FdSolution {
  public:
    FdSolution(const MarketParams& m, const GridSpec& g)
        : m_(m), tp_(derive_params(m)), g_(g) {
        t_max_ = 0.5 * m.sigma * m.sigma * m.maturity;
        dxi_ = g.xi_max / g.n_space;
        dt_ = t_max_ / g.n_time;
        v_.assign(static_cast<std::size_t>(g.n_time + 1) * (g.n_space + 1), 0.0);
    }

    double xi(int j) const { return j * dxi_; }
    double t_level(int k) const { return k * dt_; }
    double t_max() const { return t_max_; }
    const GridSpec& grid() const { return g_; }
    const MarketParams& market() const { return m_; }
    const TransformParams& transform() const { return tp_; }
    bool far_field_warning() const { return far_field_warning_; }

    double node(int k, int j) const {
        return v_[static_cast<std::size_t>(k) * (g_.n_space + 1) + j];
    }

    /// Transplanted far-field datum: the no-arbitrage asymptote
    /// V ~ S - K e^{-r(T-p)} pushed through the coordinate map,
    /// u = e^{alpha x + beta t} (e^x - e^{-2 r t / sigma^2}) at
    /// x = xi - (2 alpha + 1) t.
    double far_field(double xi_val, double t) const {
        const double x = xi_val - (2.0 * tp_.alpha + 1.0) * t;
        const double disc = std::exp(-2.0 * m_.rate * t / (m_.sigma * m_.sigma));
        return std::exp(tp_.alpha * x + tp_.beta * t) * (std::exp(x) - disc);
    }

    /// Cubic interpolation in xi, linear in t.
    double value_at(double xi_val, double t) const {
        const double eps = 1e-12;
        if (xi_val < -eps || xi_val > g_.xi_max + eps) throw DomainError("xi outside [0, xi_max]");
        if (t < -eps || t > t_max_ + eps) throw DomainError("t outside [0, sigma^2 T / 2]");
        xi_val = std::clamp(xi_val, 0.0, g_.xi_max);
        t = std::clamp(t, 0.0, t_max_);

        int k = std::min(static_cast<int>(t / dt_), g_.n_time - 1);
        const double wt = (t - t_level(k)) / dt_;

        int j0 = static_cast<int>(xi_val / dxi_) - 1;
        j0 = std::clamp(j0, 0, g_.n_space - 3);
        double w[4];
        for (int a = 0; a < 4; ++a) {
            w[a] = 1.0;
            for (int b = 0; b < 4; ++b) {
                if (a == b) continue;
                w[a] *= (xi_val - xi(j0 + b)) / (xi(j0 + a) - xi(j0 + b));
            }
        }
        double lo = 0.0, hi = 0.0;
        for (int a = 0; a < 4; ++a) {
            lo += w[a] * node(k, j0 + a);
            hi += w[a] * node(k + 1, j0 + a);
        }
        return (1.0 - wt) * lo + wt * hi;
    }

    /// Option value at a market-coordinate query, by mapping into the
    /// moving frame, interpolating, and undoing the transform. Points on
    /// or below the barrier return 0.
    double price(const PriceQuery& q, const MarketParams& m) const {
        if (!(q.spot > 0.0)) throw InvalidParameter("query spot must be > 0");
        if (!(q.time >= 0.0 && q.time <= m.maturity)) throw InvalidParameter("query time must lie in [0, T]");
        const double x = std::log(q.spot / m.strike);
        const double t = 0.5 * m.sigma * m.sigma * (m.maturity - q.time);
        const double xi_val = x + (2.0 * tp_.alpha + 1.0) * t;
        if (xi_val <= 0.0) return 0.0;
        if (xi_val > g_.xi_max) throw DomainError("query outside the truncated domain");
        const double u = value_at(xi_val, t);
        return m.strike * u * std::exp(-(tp_.alpha * x + tp_.beta * t));
    }

    /// Full grid dump, columns xi,t,v.
    void write_csv(std::ostream& os) const {
        os.imbue(std::locale::classic());
        os << "xi,t,v\n";
        os << std::setprecision(12);
        for (int k = 0; k <= g_.n_time; ++k) {
            for (int j = 0; j <= g_.n_space; ++j) {
                os << xi(j) << ',' << t_level(k) << ',' << node(k, j) << '\n';
            }
        }
    }

  private:
    friend FdSolution fd_solve(const MarketParams& m, const GridSpec& g);

    double& node_ref(int k, int j) {
        return v_[static_cast<std::size_t>(k) * (g_.n_space + 1) + j];
    }

    MarketParams m_;
    TransformParams tp_;
    GridSpec g_;
    double t_max_ = 0.0, dxi_ = 0.0, dt_ = 0.0;
    std::vector<double> v_;
    bool far_field_warning_ = false;
};

/// Crank-Nicolson solve of v_t = v_xixi - (2 alpha + 1) v_xi with the
/// first step replaced by a Rannacher pair of implicit-Euler half-steps.
/// Central advection differences require the cell Peclet condition
/// dxi < 2 / |2 alpha + 1|, enforced up front.
inline FdSolution fd_solve(const MarketParams& m, const GridSpec& g) {
    m.validate();
    g.validate();
    FdSolution sol(m, g);
    const TransformParams tp = sol.transform();
    const double c = 2.0 * tp.alpha + 1.0;
    const int N = g.n_space;
    const double dxi = g.xi_max / N;
    if (c != 0.0 && dxi >= 2.0 / std::abs(c)) {
        throw InvalidParameter("grid too coarse for central advection: need dxi < 2/|2 alpha + 1|");
    }

    for (int j = 0; j <= N; ++j) {
        sol.node_ref(0, j) = terminal_condition_heat(sol.xi(j), tp);
    }

    std::vector<double> cur(static_cast<std::size_t>(N + 1));
    for (int j = 0; j <= N; ++j) cur[static_cast<std::size_t>(j)] = sol.node(0, j);

    std::vector<double> sub(static_cast<std::size_t>(N - 2)), diag(static_cast<std::size_t>(N - 1)),
        sup(static_cast<std::size_t>(N - 2)), rhs(static_cast<std::size_t>(N - 1));

    // One theta-step of size dt_step ending at time t_new.
    const auto step = [&](double theta, double dt_step, double t_new) {
        const double mu = dt_step / (dxi * dxi);
        const double nu = c * dt_step / (2.0 * dxi);
        const double pL = mu + nu, pC = -2.0 * mu, pR = mu - nu;

        const double left_new = 0.0;
        const double right_new = sol.far_field(g.xi_max, t_new);

        for (int j = 1; j <= N - 1; ++j) {
            const std::size_t i = static_cast<std::size_t>(j - 1);
            diag[i] = 1.0 + 2.0 * theta * mu;
            if (j > 1) sub[i - 1] = -theta * pL;
            if (j < N - 1) sup[i] = -theta * pR;
            rhs[i] = cur[static_cast<std::size_t>(j)] +
                     (1.0 - theta) * (pL * cur[static_cast<std::size_t>(j - 1)] +
                                      pC * cur[static_cast<std::size_t>(j)] +
                                      pR * cur[static_cast<std::size_t>(j + 1)]);
        }
        rhs[0] += theta * pL * left_new;
        rhs[static_cast<std::size_t>(N - 2)] += theta * pR * right_new;

        detail::solve_tridiagonal(sub, diag, sup, rhs);
        cur[0] = left_new;
        for (int j = 1; j <= N - 1; ++j) cur[static_cast<std::size_t>(j)] = rhs[static_cast<std::size_t>(j - 1)];
        cur[static_cast<std::size_t>(N)] = right_new;
    };

    const double dt = sol.t_max() / g.n_time;
    for (int k = 1; k <= g.n_time; ++k) {
        const double t_new = k * dt;
        if (k == 1) {
            step(1.0, 0.5 * dt, t_new - 0.5 * dt);
            step(1.0, 0.5 * dt, t_new);
        } else {
            step(0.5, dt, t_new);
        }
        for (int j = 0; j <= N; ++j) sol.node_ref(k, j) = cur[static_cast<std::size_t>(j)];
    }

    for (double v : sol.v_) {
        if (!std::isfinite(v)) throw NumericalInstability("finite-difference solve produced NaN/Inf");
    }

    // If truncating the domain at xi_max leaks into the interior, the
    // computed solution detaches from the asymptote one node in.
    const double near = sol.node(g.n_time, N - 1);
    const double asym = sol.far_field(sol.xi(N - 1), sol.t_max());
    if (std::abs(near - asym) > 1e-3 * std::max(1.0, std::abs(asym))) {
        sol.far_field_warning_ = true;
    }
    return sol;
}

/// Closed form expressed in the moving frame, for error measurement.
inline double moving_frame_exact(double xi, double t, const TransformParams& tp) {
    return std::exp(tp.alpha * xi - tp.alpha * (tp.alpha + 1.0) * t) * std::expm1(xi);
}

struct ConvergenceRow {
    GridSpec grid;
    double max_error = 0.0;
    double observed_order = std::numeric_limits<double>::quiet_NaN();
};

/// Max-norm error against the closed form at the final time level for a
/// factor-2 refinement sequence, with the observed order between
/// consecutive grids.
inline std::vector<ConvergenceRow> convergence_study(const MarketParams& m,
                                                     std::span<const GridSpec> grids) {
    if (grids.size() < 3) throw InvalidParameter("convergence study needs at least 3 grids");
    for (std::size_t i = 1; i < grids.size(); ++i) {
        if (grids[i].n_space != 2 * grids[i - 1].n_space || grids[i].n_time != 2 * grids[i - 1].n_time ||
            grids[i].xi_max != grids[i - 1].xi_max) {
            throw InvalidParameter("grids must refine by a factor of 2 in space and time");
        }
    }
    std::vector<ConvergenceRow> rows;
    for (const GridSpec& g : grids) {
        const FdSolution sol = fd_solve(m, g);
        const TransformParams tp = sol.transform();
        double err = 0.0;
        for (int j = 1; j < g.n_space; ++j) {
            const double e = std::abs(sol.node(g.n_time, j) - moving_frame_exact(sol.xi(j), sol.t_max(), tp));
            err = std::max(err, e);
        }
        ConvergenceRow row;
        row.grid = g;
        row.max_error = err;
        if (!rows.empty()) {
            row.observed_order = std::log2(rows.back().max_error / err);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace liebarrier
