#include "suptrap/pathsum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "suptrap/quantum.hpp"

namespace suptrap::pathsum {

namespace {

using Complex = std::complex<double>;

void check_point(const HoppingKernel& kernel, SpacetimePoint p, const char* name) {
    if (p.site < 0 || p.site >= kernel.n_sites())
        throw std::invalid_argument(std::string(name) + ": site out of range");
    if (p.step < 0)
        throw std::invalid_argument(std::string(name) + ": negative time step");
}

void check_budget(int n_sites, int steps) {
    if (steps < 1 || steps > kMaxEnumerationSteps)
        throw std::invalid_argument("enumeration too large");
    if (std::pow(static_cast<double>(n_sites), steps - 1) > kEnumerationBudget)
        throw std::invalid_argument("enumeration too large");
}

// Depth-first sum over all continuations from `site` with `remaining` hops
// left, ending at `target`. `pin_depth` (counted in remaining hops) forces
// the site right after that hop; -1 disables pinning.
Complex sum_paths(const Eigen::MatrixXcd& k, int site, int remaining, int target,
                  int pin_depth, int pin_site) {
    if (remaining == 1) {
        if (pin_depth == 1 && target != pin_site) return 0.0;
        return k(target, site);
    }
    Complex total = 0.0;
    const int n = static_cast<int>(k.rows());
    if (pin_depth == remaining) {
        return k(pin_site, site) *
               sum_paths(k, pin_site, remaining - 1, target, -1, pin_site);
    }
    for (int next = 0; next < n; ++next)
        total += k(next, site) *
                 sum_paths(k, next, remaining - 1, target, pin_depth, pin_site);
    return total;
}

}  // namespace

HoppingKernel::HoppingKernel(Eigen::MatrixXcd step_matrix)
    : step(std::move(step_matrix)) {
    if (step.rows() != step.cols() || step.rows() < 2)
        throw std::invalid_argument("hopping kernel must be square, >= 2 sites");
    if (!quantum::is_unitary(step, 1e-12))
        throw std::invalid_argument("hopping kernel must be unitary");
}

Eigen::VectorXcd propagate(const HoppingKernel& kernel,
                           const Eigen::VectorXcd& psi0, int steps) {
    if (steps < 0) throw std::invalid_argument("propagate: negative step count");
    if (psi0.size() != kernel.n_sites())
        throw std::invalid_argument("propagate: state dimension mismatch");
    Eigen::VectorXcd psi = psi0;
    for (int t = 0; t < steps; ++t) psi = kernel.step * psi;
    return psi;
}

std::complex<double> enumerate_paths(const HoppingKernel& kernel,
                                     SpacetimePoint a, SpacetimePoint c) {
    check_point(kernel, a, "A");
    check_point(kernel, c, "C");
    const int steps = c.step - a.step;
    check_budget(kernel.n_sites(), steps);
    return sum_paths(kernel.step, a.site, steps, c.site, -1, 0);
}

std::complex<double> through_point_amplitude(const HoppingKernel& kernel,
                                             SpacetimePoint a, SpacetimePoint b,
                                             SpacetimePoint c) {
    check_point(kernel, a, "A");
    check_point(kernel, b, "B");
    check_point(kernel, c, "C");
    if (!(a.step < b.step && b.step < c.step))
        throw std::invalid_argument("through_point_amplitude requires A.step < B.step < C.step");
    const int steps = c.step - a.step;
    check_budget(kernel.n_sites(), steps);
    // Pin the site reached after (b.step - a.step) hops, i.e. when
    // (steps - (b.step - a.step) + 1) hops remain.
    const int pin_depth = steps - (b.step - a.step) + 1;
    return sum_paths(kernel.step, a.site, steps, c.site, pin_depth, b.site);
}

ScreeningReport null_screening_check(const HoppingKernel& kernel,
                                     const Eigen::VectorXcd& psi0,
                                     const std::vector<SpacetimePoint>& null_sites,
                                     int t_check) {
    if (t_check < 0) throw std::invalid_argument("null_screening_check: negative t_check");
    if (psi0.size() != kernel.n_sites())
        throw std::invalid_argument("null_screening_check: state dimension mismatch");

    // Precondition sweep: every listed point must genuinely carry zero
    // amplitude under plain propagation.
    for (const auto& p : null_sites) {
        check_point(kernel, p, "null point");
        if (p.step > t_check) continue;
        const Eigen::VectorXcd at = propagate(kernel, psi0, p.step);
        const double mag = std::abs(at[p.site]);
        if (mag >= 1e-12)
            throw std::invalid_argument(
                "site " + std::to_string(p.site) + " at step " +
                std::to_string(p.step) +
                " is not null: |amplitude| = " + std::to_string(mag));
    }

    Eigen::VectorXcd plain = psi0;
    Eigen::VectorXcd screened = psi0;
    for (const auto& p : null_sites)
        if (p.step == 0) screened[p.site] = 0.0;
    for (int t = 1; t <= t_check; ++t) {
        plain = kernel.step * plain;
        screened = kernel.step * screened;
        for (const auto& p : null_sites)
            if (p.step == t) screened[p.site] = 0.0;
    }

    ScreeningReport report;
    report.points_checked = static_cast<int>(null_sites.size());
    report.max_deviation = (plain - screened).cwiseAbs().maxCoeff();
    report.passed = report.max_deviation < 1e-10;
    return report;
}

HoppingKernel symmetric_hopping_kernel(int n_sites, double theta) {
    if (n_sites < 3 || n_sites % 2 == 0)
        throw std::invalid_argument("symmetric kernel needs an odd site count >= 3");
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_sites, n_sites);
    for (int i = 0; i + 1 < n_sites; ++i) {
        h(i, i + 1) = 1.0;
        h(i + 1, i) = 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n_sites, n_sites);
    for (int m = 0; m < n_sites; ++m) {
        const Eigen::VectorXcd v = es.eigenvectors().col(m).cast<Complex>();
        k += std::polar(1.0, theta * es.eigenvalues()[m]) * v * v.adjoint();
    }
    return HoppingKernel(std::move(k));
}

StudyReport run_study(int instances, int max_sites, int max_steps,
                      RngStream& rng) {
    if (instances < 1) throw std::invalid_argument("run_study: instances must be >= 1");
    if (max_sites < 2 || max_steps < 2)
        throw std::invalid_argument("run_study: need >= 2 sites and >= 2 steps");

    StudyReport report;
    report.instances = instances;

    for (int i = 0; i < instances; ++i) {
        const int n = 2 + static_cast<int>(rng.uniform_index(
                              static_cast<std::size_t>(max_sites - 1)));
        const int t_total = 2 + static_cast<int>(rng.uniform_index(
                                    static_cast<std::size_t>(max_steps - 1)));
        HoppingKernel kernel(quantum::random_unitary(n, rng));

        const SpacetimePoint a{static_cast<int>(rng.uniform_index(n)), 0};
        const SpacetimePoint c{static_cast<int>(rng.uniform_index(n)), t_total};
        const int b_step = 1 + static_cast<int>(rng.uniform_index(
                                   static_cast<std::size_t>(t_total - 1)));
        const SpacetimePoint b{static_cast<int>(rng.uniform_index(n)), b_step};

        const Complex direct = enumerate_paths(kernel, a, c);

        // enumeration vs matrix propagation
        Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
        e0[a.site] = 1.0;
        const Complex propagated = propagate(kernel, e0, t_total)[c.site];
        report.max_propagation_error =
            std::max(report.max_propagation_error, std::abs(direct - propagated));

        // through-point factorization
        const Complex through = through_point_amplitude(kernel, a, b, c);
        const Complex product =
            enumerate_paths(kernel, a, b) * enumerate_paths(kernel, b, c);
        report.max_factorization_error =
            std::max(report.max_factorization_error, std::abs(through - product));

        // slice decomposition over all intermediate sites
        Complex slice_sum = 0.0;
        for (int site = 0; site < n; ++site)
            slice_sum += through_point_amplitude(kernel, a, {site, b_step}, c);
        report.max_decomposition_error =
            std::max(report.max_decomposition_error, std::abs(slice_sum - direct));
    }

    // Parity-constructed screening instance: centre site stays null under an
    // antisymmetric initial state.
    const int n_sites = 3;
    HoppingKernel kernel = symmetric_hopping_kernel(n_sites, 0.3 + rng.uniform());
    Eigen::VectorXcd psi0(n_sites);
    psi0 << 1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0);
    const int t_check = 12;
    std::vector<SpacetimePoint> nulls;
    for (int t = 0; t <= t_check; ++t) nulls.push_back({1, t});
    report.max_screening_deviation =
        null_screening_check(kernel, psi0, nulls, t_check).max_deviation;

    return report;
}

}  // namespace suptrap::pathsum
