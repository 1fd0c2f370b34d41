#pragma once

#include <Eigen/Dense>
#include <vector>

namespace suptrap::wavefield {

// Uniform 1D grid including both wall points; hard walls are Dirichlet
// psi = 0 at the first and last sample.
struct Grid1D {
    double x_min = 0.0;
    double dx = 1.0;
    int n_points = 8;

    void validate() const;
    double x(int i) const { return x_min + i * dx; }
    double x_max() const { return x(n_points - 1); }
    double length() const { return dx * (n_points - 1); }
    bool operator==(const Grid1D&) const = default;
};

struct Potential {
    Eigen::VectorXd samples;

    static Potential zero(const Grid1D& grid);
};

// Complex samples of psi(x) on a Grid1D, natural units (hbar = 1).
// Discrete norm is sum |psi_i|^2 dx.
class GridWavefunction {
public:
    GridWavefunction(Grid1D grid, Eigen::VectorXcd samples, double mass);

    const Grid1D& grid() const { return grid_; }
    const Eigen::VectorXcd& samples() const { return samples_; }
    double mass() const { return mass_; }
    double discrete_norm() const;

private:
    Grid1D grid_;
    Eigen::VectorXcd samples_;
    double mass_;
};

// Interval whose endpoints are intended to sit on nodes of the state.
struct BubbleBoundary {
    double a = 0.0;
    double b = 0.0;
};

// One Crank-Nicolson step of i d(psi)/dt = -(1/2m) psi'' + V psi with
// Dirichlet walls; exactly norm-preserving up to round-off.
GridWavefunction evolve_step(const GridWavefunction& psi, const Potential& v,
                             double dt);

// rho_i = |psi_i|^2.
Eigen::VectorXd density(const GridWavefunction& psi);

// j_i = Im(conj(psi_i) D psi_i) / m, central differences inside and
// one-sided at the walls; vanishes identically wherever psi_i == 0.
Eigen::VectorXd current(const GridWavefunction& psi);

// Discrete check of d(rho)/dt + div j = 0 between two consecutive states:
// max over interior points of |(rho_b - rho_a)/dt + D j_mid|, where j_mid is
// the current of the un-renormalized midpoint state (psi_a + psi_b)/2.
double continuity_residual(const GridWavefunction& a, const GridWavefunction& b,
                           double dt);

// Trapezoid integral of the density over [boundary.a, boundary.b], with
// linear interpolation for off-grid endpoints.
double region_probability(const GridWavefunction& psi,
                          const BubbleBoundary& boundary);

// Interior positions where the density passes through (approximately) zero:
// sign changes of the dominant-phase-rotated real part, plus strict local
// density minima below tol * max(rho). Sorted ascending.
std::vector<double> find_nodes(const GridWavefunction& psi, double tol = 1e-6);

// Hydrogen 2s radial wavefunction R20(r) = (1/(2 sqrt 2)) (2 - r) e^{-r/2},
// atomic units.
double hydrogen_2s_radial(double r);

struct BubbleTrace {
    std::vector<int> steps;
    std::vector<double> times;
    std::vector<double> enclosed;               // region probability
    std::vector<double> boundary_current_max;   // max |j| at the two endpoints
    std::vector<double> norms;
};

// Evolves n_steps, recording the enclosed probability, the boundary current
// and the norm at step 0 and after every step.
BubbleTrace bubble_trace(const GridWavefunction& psi0, const Potential& v,
                         const BubbleBoundary& boundary, double dt, int n_steps);

// Test/CLI state builders. Box states have their wall samples forced to an
// exact 0 so Dirichlet evolution is clean.
GridWavefunction box_eigenstate(const Grid1D& grid, int n, double mass);
GridWavefunction box_superposition(const Grid1D& grid,
                                   const std::vector<int>& modes,
                                   const std::vector<double>& weights,
                                   double mass);
GridWavefunction gaussian_packet(const Grid1D& grid, double x0, double sigma,
                                 double k0, double mass);
// R20 sampled on a radial grid (grid.x_min > 0), normalized discretely.
// Diagnostic state for node finding; not meant for Dirichlet evolution.
GridWavefunction hydrogen_2s_state(const Grid1D& grid);

}  // namespace suptrap::wavefield
