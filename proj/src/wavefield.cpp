#include "suptrap/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace suptrap::wavefield {

namespace {

using Complex = std::complex<double>;

void require_same_grid(const Grid1D& a, const Grid1D& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

}  // namespace

void Grid1D::validate() const {
    if (dx <= 0.0) throw std::invalid_argument("grid dx must be positive");
    if (n_points < 8) throw std::invalid_argument("grid needs at least 8 points");
}

Potential Potential::zero(const Grid1D& grid) {
    return Potential{Eigen::VectorXd::Zero(grid.n_points)};
}

GridWavefunction::GridWavefunction(Grid1D grid, Eigen::VectorXcd samples,
                                   double mass)
    : grid_(grid), samples_(std::move(samples)), mass_(mass) {
    grid_.validate();
    if (samples_.size() != grid_.n_points)
        throw std::invalid_argument("sample count does not match grid");
    if (!(mass_ > 0.0)) throw std::invalid_argument("mass must be positive");
    if (!samples_.allFinite())
        throw std::invalid_argument("wavefunction samples must be finite");
    const double n = discrete_norm();
    if (std::abs(n - 1.0) > 1e-10)
        throw std::invalid_argument("wavefunction not normalized: norm = " +
                                    std::to_string(n));
}

double GridWavefunction::discrete_norm() const {
    return samples_.squaredNorm() * grid_.dx;
}

GridWavefunction evolve_step(const GridWavefunction& psi, const Potential& v,
                             double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_step: dt must be positive");
    if (v.samples.size() != psi.grid().n_points)
        throw std::invalid_argument("evolve_step: grid mismatch");

    const int n = psi.grid().n_points;
    const double dx = psi.grid().dx;
    const double hop = -1.0 / (2.0 * psi.mass() * dx * dx);  // off-diagonal of H
    const Complex half_i_dt(0.0, dt / 2.0);

    // (1 + i dt/2 H) psi_next = (1 - i dt/2 H) psi, interior points only.
    const Eigen::VectorXcd& in = psi.samples();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    for (int i = 1; i < n - 1; ++i) {
        const double diag = -2.0 * hop + v.samples[i];
        rhs[i] = in[i] - half_i_dt * (hop * in[i - 1] + diag * in[i] + hop * in[i + 1]);
    }

    // Thomas solve on the interior tridiagonal system.
    const int m = n - 2;
    Eigen::VectorXcd cprime(m), dprime(m);
    const Complex lower = half_i_dt * hop;  // also the upper coefficient
    {
        const Complex a0 = 1.0 + half_i_dt * (-2.0 * hop + v.samples[1]);
        cprime[0] = lower / a0;
        dprime[0] = rhs[1] / a0;
    }
    for (int k = 1; k < m; ++k) {
        const Complex ak = 1.0 + half_i_dt * (-2.0 * hop + v.samples[k + 1]);
        const Complex denom = ak - lower * cprime[k - 1];
        cprime[k] = lower / denom;
        dprime[k] = (rhs[k + 1] - lower * dprime[k - 1]) / denom;
    }

    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    out[m] = dprime[m - 1];
    for (int k = m - 2; k >= 0; --k) out[k + 1] = dprime[k] - cprime[k] * out[k + 2];

    return GridWavefunction(psi.grid(), std::move(out), psi.mass());
}

Eigen::VectorXd density(const GridWavefunction& psi) {
    return psi.samples().cwiseAbs2();
}

namespace {

Eigen::VectorXd current_of_samples(const Eigen::VectorXcd& s, double dx,
                                   double mass) {
    const Eigen::Index n = s.size();
    Eigen::VectorXd j(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex dpsi;
        if (i == 0)
            dpsi = (s[1] - s[0]) / dx;
        else if (i == n - 1)
            dpsi = (s[n - 1] - s[n - 2]) / dx;
        else
            dpsi = (s[i + 1] - s[i - 1]) / (2.0 * dx);
        j[i] = std::imag(std::conj(s[i]) * dpsi) / mass;
    }
    return j;
}

}  // namespace

Eigen::VectorXd current(const GridWavefunction& psi) {
    return current_of_samples(psi.samples(), psi.grid().dx, psi.mass());
}

double continuity_residual(const GridWavefunction& a, const GridWavefunction& b,
                           double dt) {
    require_same_grid(a.grid(), b.grid(), "continuity_residual");
    if (!(dt > 0.0))
        throw std::invalid_argument("continuity_residual: dt must be positive");

    const Eigen::VectorXcd mid = 0.5 * (a.samples() + b.samples());
    const Eigen::VectorXd j =
        current_of_samples(mid, a.grid().dx, a.mass());
    const Eigen::VectorXd rho_a = density(a);
    const Eigen::VectorXd rho_b = density(b);

    const double dx = a.grid().dx;
    double worst = 0.0;
    for (int i = 1; i < a.grid().n_points - 1; ++i) {
        const double drho_dt = (rho_b[i] - rho_a[i]) / dt;
        const double div_j = (j[i + 1] - j[i - 1]) / (2.0 * dx);
        worst = std::max(worst, std::abs(drho_dt + div_j));
    }
    return worst;
}

double region_probability(const GridWavefunction& psi,
                          const BubbleBoundary& boundary) {
    const Grid1D& g = psi.grid();
    if (boundary.a > boundary.b)
        throw std::invalid_argument("region boundary must satisfy a <= b");
    if (boundary.a < g.x_min - 1e-12 || boundary.b > g.x_max() + 1e-12)
        throw std::invalid_argument("region boundary outside the grid domain");
    if (boundary.a == boundary.b) return 0.0;

    const Eigen::VectorXd rho = density(psi);
    auto rho_at = [&](double pos) {
        double u = (pos - g.x_min) / g.dx;
        u = std::clamp(u, 0.0, static_cast<double>(g.n_points - 1));
        const int i = std::min(static_cast<int>(u), g.n_points - 2);
        const double t = u - i;
        return (1.0 - t) * rho[i] + t * rho[i + 1];
    };

    // Trapezoid over the piecewise-linear density from a to b.
    const int ia = std::min(static_cast<int>(std::ceil((boundary.a - g.x_min) / g.dx)),
                            g.n_points - 1);
    const int ib = std::max(static_cast<int>(std::floor((boundary.b - g.x_min) / g.dx)), 0);

    if (ia > ib)  // both endpoints inside one cell
        return 0.5 * (rho_at(boundary.a) + rho_at(boundary.b)) *
               (boundary.b - boundary.a);

    double total = 0.0;
    const double xa = g.x(ia), xb = g.x(ib);
    if (boundary.a < xa)
        total += 0.5 * (rho_at(boundary.a) + rho[ia]) * (xa - boundary.a);
    for (int i = ia; i < ib; ++i) total += 0.5 * (rho[i] + rho[i + 1]) * g.dx;
    if (boundary.b > xb)
        total += 0.5 * (rho[ib] + rho_at(boundary.b)) * (boundary.b - xb);
    return total;
}

std::vector<double> find_nodes(const GridWavefunction& psi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("find_nodes: tol must be positive");

    const Grid1D& g = psi.grid();
    const Eigen::VectorXcd& s = psi.samples();
    const Eigen::VectorXd rho = density(psi);
    const double rho_max = rho.maxCoeff();
    if (rho_max <= 0.0) return {};
    const double rho_thr = tol * rho_max;

    // Rotate out the dominant global phase so a real-up-to-phase state has a
    // real profile whose sign changes mark the nodes.
    Eigen::Index peak;
    rho.maxCoeff(&peak);
    const Complex phase = s[peak] / std::abs(s[peak]);
    Eigen::VectorXd chi(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        chi[i] = std::real(s[i] / phase);
    const double chi_floor = 1e-12 * chi.cwiseAbs().maxCoeff();

    std::vector<double> nodes;
    auto push_node = [&](double x) {
        if (x <= g.x_min || x >= g.x_max()) return;
        if (!nodes.empty() && std::abs(nodes.back() - x) < 0.5 * g.dx) return;
        nodes.push_back(x);
    };

    // Sign changes of chi, treating |chi| below the noise floor as zero runs.
    int last_sign = 0;
    int last_idx = -1;
    for (int i = 0; i < g.n_points; ++i) {
        const int sign = (std::abs(chi[i]) <= chi_floor) ? 0 : (chi[i] > 0 ? 1 : -1);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) {
            if (i == last_idx + 1) {
                const double t = chi[last_idx] / (chi[last_idx] - chi[i]);
                push_node(g.x(last_idx) + t * g.dx);
            } else {
                // zero run between opposite signs: node at the run centre
                push_node(0.5 * (g.x(last_idx) + g.x(i)));
            }
        }
        last_sign = sign;
        last_idx = i;
    }

    // Strict local density minima below the threshold (touching zeros and
    // states whose phase structure defeats the rotation).
    for (int i = 1; i < g.n_points - 1; ++i) {
        if (rho[i] < rho_thr && rho[i] < rho[i - 1] && rho[i] < rho[i + 1]) {
            // parabolic refinement of the minimum position
            const double denom = rho[i - 1] - 2.0 * rho[i] + rho[i + 1];
            const double shift =
                (denom > 0.0) ? 0.5 * (rho[i - 1] - rho[i + 1]) / denom : 0.0;
            const double x = g.x(i) + std::clamp(shift, -0.5, 0.5) * g.dx;
            const bool known = std::any_of(nodes.begin(), nodes.end(), [&](double y) {
                return std::abs(y - x) < g.dx;
            });
            if (!known) push_node(x);
        }
    }

    std::sort(nodes.begin(), nodes.end());
    return nodes;
}

double hydrogen_2s_radial(double r) {
    if (r < 0.0) throw std::invalid_argument("hydrogen_2s_radial: r must be nonnegative");
    return (2.0 - r) * std::exp(-r / 2.0) / (2.0 * std::sqrt(2.0));
}

BubbleTrace bubble_trace(const GridWavefunction& psi0, const Potential& v,
                         const BubbleBoundary& boundary, double dt, int n_steps) {
    if (n_steps < 0) throw std::invalid_argument("bubble_trace: n_steps must be >= 0");

    BubbleTrace trace;
    auto boundary_current = [&](const GridWavefunction& psi) {
        const Eigen::VectorXd j = current(psi);
        const Grid1D& g = psi.grid();
        auto j_at = [&](double pos) {
            double u = std::clamp((pos - g.x_min) / g.dx, 0.0,
                                  static_cast<double>(g.n_points - 1));
            const int i = std::min(static_cast<int>(u), g.n_points - 2);
            const double t = u - i;
            return (1.0 - t) * j[i] + t * j[i + 1];
        };
        return std::max(std::abs(j_at(boundary.a)), std::abs(j_at(boundary.b)));
    };

    GridWavefunction psi = psi0;
    auto record = [&](int step) {
        trace.steps.push_back(step);
        trace.times.push_back(step * dt);
        trace.enclosed.push_back(region_probability(psi, boundary));
        trace.boundary_current_max.push_back(boundary_current(psi));
        trace.norms.push_back(psi.discrete_norm());
    };

    record(0);
    for (int step = 1; step <= n_steps; ++step) {
        psi = evolve_step(psi, v, dt);
        record(step);
    }
    return trace;
}

namespace {

GridWavefunction normalized_state(const Grid1D& grid, Eigen::VectorXcd samples,
                                  double mass) {
    const double n = std::sqrt(samples.squaredNorm() * grid.dx);
    if (n < 1e-150) throw std::invalid_argument("degenerate wavefunction");
    return GridWavefunction(grid, samples / n, mass);
}

Eigen::VectorXcd box_mode_samples(const Grid1D& grid, int n) {
    if (n < 1) throw std::invalid_argument("box eigenstate index must be >= 1");
    const double len = grid.length();
    Eigen::VectorXcd s(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i)
        s[i] = std::sin(n * M_PI * (grid.x(i) - grid.x_min) / len);
    s[0] = 0.0;
    s[grid.n_points - 1] = 0.0;
    return s;
}

}  // namespace

GridWavefunction box_eigenstate(const Grid1D& grid, int n, double mass) {
    return normalized_state(grid, box_mode_samples(grid, n), mass);
}

GridWavefunction box_superposition(const Grid1D& grid,
                                   const std::vector<int>& modes,
                                   const std::vector<double>& weights,
                                   double mass) {
    if (modes.empty() || modes.size() != weights.size())
        throw std::invalid_argument("box_superposition: modes/weights mismatch");
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(grid.n_points);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        Eigen::VectorXcd mode = box_mode_samples(grid, modes[k]);
        const double mn = std::sqrt(mode.squaredNorm() * grid.dx);
        s += (weights[k] / mn) * mode;
    }
    return normalized_state(grid, std::move(s), mass);
}

GridWavefunction gaussian_packet(const Grid1D& grid, double x0, double sigma,
                                 double k0, double mass) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_packet: sigma must be positive");
    Eigen::VectorXcd s(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        const double envelope = std::exp(-(x - x0) * (x - x0) / (4.0 * sigma * sigma));
        s[i] = envelope * std::polar(1.0, k0 * x);
    }
    s[0] = 0.0;
    s[grid.n_points - 1] = 0.0;
    return normalized_state(grid, std::move(s), mass);
}

GridWavefunction hydrogen_2s_state(const Grid1D& grid) {
    if (grid.x_min <= 0.0)
        throw std::invalid_argument("hydrogen_2s_state: radial grid must start at r > 0");
    Eigen::VectorXcd s(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) s[i] = hydrogen_2s_radial(grid.x(i));
    return normalized_state(grid, std::move(s), 1.0);
}

}  // namespace suptrap::wavefield
