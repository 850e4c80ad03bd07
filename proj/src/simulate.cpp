#include "cobro/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace cobro {

namespace {

// Walks a ChainPath cell by cell, integrating alpha exactly.
struct OccupationCursor {
    const ChainPath& path;
    const std::vector<double>& alpha;
    size_t seg = 0;      // current segment index into states
    double pos = 0.0;    // current time

    double advance_to(double t) {
        double acc = 0.0;
        while (pos < t) {
            const double seg_end =
                (seg < path.jump_times.size()) ? path.jump_times[seg] : path.horizon;
            const double hi = std::min(seg_end, t);
            acc += alpha[path.states[seg]] * (hi - pos);
            pos = hi;
            if (pos >= seg_end && seg + 1 < path.states.size()) ++seg;
            if (pos >= t) break;
        }
        return acc;
    }
};

int cdf_pick_row(const double* row, int n, double u) {
    double acc = 0.0;
    for (int j = 0; j < n - 1; ++j) {
        acc += row[j];
        if (u < acc) return j;
    }
    return n - 1;
}

int locate(const TimeGrid& grid, double t, const char* what) {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(grid.points.begin(), grid.points.end(), t - tol);
    if (it == grid.points.end() || std::abs(*it - t) > tol)
        throw config_error(std::string(what) + ": time is not a grid point");
    return static_cast<int>(it - grid.points.begin());
}

} // namespace

void TimeGrid::validate() const {
    if (points.size() < 2) throw config_error("time grid: need at least two points");
    if (points.front() != 0.0) throw config_error("time grid: must start at 0");
    for (size_t k = 1; k < points.size(); ++k)
        if (!(points[k] > points[k - 1]))
            throw config_error("time grid: points must be strictly increasing");
    if (!std::isfinite(points.back())) throw config_error("time grid: non-finite point");
}

TimeGrid TimeGrid::uniform(double horizon, int n_steps) {
    if (!(horizon > 0.0) || n_steps < 1)
        throw config_error("time grid: horizon and step count must be positive");
    TimeGrid g;
    g.points.resize(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k)
        g.points[k] = horizon * static_cast<double>(k) / n_steps;
    g.points.back() = horizon;
    return g;
}

PathBundle simulate_cd_path(const RegimeConfig& cfg, const TimeGrid& grid, RngStream& rng) {
    cfg.validate();
    grid.validate();
    const int n = grid.n_steps();

    const uint64_t u0 = rng.uniforms_drawn();
    const uint64_t n0 = rng.normals_drawn();

    const ChainPath chain = sample_chain_path(cfg, grid.horizon(), rng);
    OccupationCursor cursor{chain, cfg.alpha};

    PathBundle out;
    out.grid = grid;
    out.b.assign(n + 1, 0.0);
    out.w.assign(n + 1, 0.0);
    out.x.assign(n + 1, 0.0);
    out.y.assign(n + 1, 0.0);
    out.t_clock.assign(n + 1, 0.0);
    out.s_clock.assign(n + 1, 0.0);
    out.rho.assign(n, 0.0);

    for (int k = 0; k < n; ++k) {
        const double dt = grid.points[k + 1] - grid.points[k];
        const double d_t_clock = cursor.advance_to(grid.points[k + 1]);
        const double d_s_clock = std::max(0.0, dt - d_t_clock);

        const double dx = rng.normal() * std::sqrt(d_t_clock);
        const double dy = rng.normal() * std::sqrt(d_s_clock);

        out.x[k + 1] = out.x[k] + dx;
        out.y[k + 1] = out.y[k] + dy;
        out.b[k + 1] = out.x[k + 1] + out.y[k + 1];
        out.w[k + 1] = out.x[k + 1] - out.y[k + 1];
        out.t_clock[k + 1] = out.t_clock[k] + d_t_clock;
        out.s_clock[k + 1] = out.s_clock[k] + d_s_clock;
        out.rho[k] = 2.0 * d_t_clock / dt - 1.0;
    }

    out.uniform_draws = rng.uniforms_drawn() - u0;
    out.normal_draws = rng.normals_drawn() - n0;
    return out;
}

EndpointSample simulate_cd_endpoint(const RegimeConfig& cfg, double t, int n_steps,
                                    RngStream& rng) {
    cfg.validate();
    if (!(t > 0.0) || n_steps < 1)
        throw config_error("simulate_cd_endpoint: horizon and step count must be positive");
    const int n = cfg.n();
    const double dt = t / n_steps;
    const std::vector<double> p = transition_matrix(cfg.gen, dt);

    const uint64_t u0 = rng.uniforms_drawn();
    const uint64_t n0 = rng.normals_drawn();

    int s = cdf_pick_row(cfg.q0.data(), n, rng.uniform());
    double t_clock = 0.0;
    for (int k = 0; k < n_steps; ++k) {
        t_clock += cfg.alpha[s] * dt;
        if (k + 1 < n_steps)
            s = cdf_pick_row(&p[static_cast<size_t>(s) * n], n, rng.uniform());
    }

    EndpointSample out;
    out.t = t;
    out.t_clock = t_clock;
    out.s_clock = t - t_clock;
    const double xv = rng.normal() * std::sqrt(t_clock);
    const double yv = rng.normal() * std::sqrt(out.s_clock);
    out.b = xv + yv;
    out.w = xv - yv;
    out.uniform_draws = rng.uniforms_drawn() - u0;
    out.normal_draws = rng.normals_drawn() - n0;
    return out;
}

PathBundle simulate_euler_path(const RegimeConfig& cfg, const TimeGrid& grid,
                               RngStream& rng) {
    cfg.validate();
    grid.validate();
    const int n = grid.n_steps();
    const int ns = cfg.n();

    const uint64_t u0 = rng.uniforms_drawn();
    const uint64_t n0 = rng.normals_drawn();

    PathBundle out;
    out.grid = grid;
    out.b.assign(n + 1, 0.0);
    out.w.assign(n + 1, 0.0);
    out.x.assign(n + 1, 0.0);
    out.y.assign(n + 1, 0.0);
    out.t_clock.assign(n + 1, 0.0);
    out.s_clock.assign(n + 1, 0.0);
    out.rho.assign(n, 0.0);

    int s = cdf_pick_row(cfg.q0.data(), ns, rng.uniform());

    double last_dt = -1.0;
    std::vector<double> p;
    for (int k = 0; k < n; ++k) {
        const double dt = grid.points[k + 1] - grid.points[k];
        const double rho = cfg.rho_of_state(s);
        const double sdt = std::sqrt(dt);

        const double db = rng.normal() * sdt;
        const double dz = rng.normal() * sdt;
        const double dw = rho * db + std::sqrt(1.0 - rho * rho) * dz;

        out.b[k + 1] = out.b[k] + db;
        out.w[k + 1] = out.w[k] + dw;
        out.t_clock[k + 1] = out.t_clock[k] + cfg.alpha[s] * dt;
        out.s_clock[k + 1] = out.s_clock[k] + (1.0 - cfg.alpha[s]) * dt;
        out.rho[k] = rho;

        if (k + 1 < n) {
            if (dt != last_dt) {
                p = transition_matrix(cfg.gen, dt);
                last_dt = dt;
            }
            s = cdf_pick_row(&p[static_cast<size_t>(s) * ns], ns, rng.uniform());
        }
    }
    for (int k = 0; k <= n; ++k) {
        out.x[k] = 0.5 * (out.b[k] + out.w[k]);
        out.y[k] = 0.5 * (out.b[k] - out.w[k]);
    }

    out.uniform_draws = rng.uniforms_drawn() - u0;
    out.normal_draws = rng.normals_drawn() - n0;
    return out;
}

double estimate_rho_hat(const PathBundle& path) {
    const int n = path.grid.n_steps();
    if (n < 1) throw config_error("estimate_rho_hat: empty path");
    double acc = 0.0;
    for (int k = 0; k < n; ++k)
        acc += (path.b[k + 1] - path.b[k]) * (path.w[k + 1] - path.w[k]);
    return acc / path.grid.horizon();
}

double realized_covariance(double sigma1, double sigma2, const PathBundle& path, double t) {
    const int i = locate(path.grid, t, "realized_covariance");
    return sigma1 * sigma2 * (2.0 * path.t_clock[i] - t);
}

double average_rho(const PathBundle& path, double t) {
    if (!(t > 0.0)) throw config_error("average_rho: time must be positive");
    const int i = locate(path.grid, t, "average_rho");
    return (2.0 * path.t_clock[i] - t) / t;
}

} // namespace cobro
