#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "suptrap/rng.hpp"

namespace suptrap::pathsum {

// One-time-step hopping amplitudes on a finite site lattice; step(b, a) is
// the amplitude to hop from site a to site b. Unitarity makes path weights
// compose like exp(i S) with an additive action.
struct HoppingKernel {
    Eigen::MatrixXcd step;

    explicit HoppingKernel(Eigen::MatrixXcd step_matrix);
    int n_sites() const { return static_cast<int>(step.rows()); }
};

struct SpacetimePoint {
    int site = 0;
    int step = 0;
};

inline constexpr double kEnumerationBudget = 1e8;  // path terms
inline constexpr int kMaxEnumerationSteps = 14;

// psi after `steps` applications of the kernel.
Eigen::VectorXcd propagate(const HoppingKernel& kernel,
                           const Eigen::VectorXcd& psi0, int steps);

// Explicit sum over every intermediate site sequence from A to C; equals
// the (C.site, A.site) entry of step^T by construction of the lattice.
std::complex<double> enumerate_paths(const HoppingKernel& kernel,
                                     SpacetimePoint a, SpacetimePoint c);

// Same sum restricted to paths whose site at b.step equals b.site.
std::complex<double> through_point_amplitude(const HoppingKernel& kernel,
                                             SpacetimePoint a, SpacetimePoint b,
                                             SpacetimePoint c);

struct ScreeningReport {
    bool passed = false;
    double max_deviation = 0.0;
    int points_checked = 0;
};

// Verifies that zeroing amplitudes at genuinely-null spacetime points during
// propagation changes the state at t_check by less than 1e-10. Throws if a
// listed point is not actually null (|amplitude| >= 1e-12).
ScreeningReport null_screening_check(const HoppingKernel& kernel,
                                     const Eigen::VectorXcd& psi0,
                                     const std::vector<SpacetimePoint>& null_sites,
                                     int t_check);

struct StudyReport {
    int instances = 0;
    double max_factorization_error = 0.0;
    double max_decomposition_error = 0.0;
    double max_propagation_error = 0.0;
    double max_screening_deviation = 0.0;
};

// Randomized factorization/decomposition study plus the parity-symmetric
// screening instance; drives the CLI report and the acceptance run.
StudyReport run_study(int instances, int max_sites, int max_steps,
                      RngStream& rng);

// Reflection-symmetric kernel exp(i theta H) on an odd number of sites, with
// H the nearest-neighbour hopping matrix. Antisymmetric initial states keep
// the centre site null at every step.
HoppingKernel symmetric_hopping_kernel(int n_sites, double theta);

}  // namespace suptrap::pathsum
