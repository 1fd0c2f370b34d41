#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "suptrap/rng.hpp"

namespace suptrap::quantum {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Norm handling: drift up to kNormSlack is treated as exact, drift up to
// kNormRepair is silently renormalized, anything past kNormHardLimit is a bug
// and throws.
inline constexpr double kNormSlack = 1e-10;
inline constexpr double kNormRepair = 1e-10;
inline constexpr double kNormHardLimit = 1e-6;
inline constexpr double kUnitaryTol = 1e-10;

// Finite-dimensional pure state over an ordered, labeled basis.
// Construction stores amplitudes as given (possibly unnormalized);
// operations that require a unit state apply the norm policy above.
// The label list is shared between states derived from one another.
class PureState {
public:
    using Labels = std::shared_ptr<const std::vector<std::string>>;

    PureState(std::vector<std::string> labels, Vector amplitudes);
    // Shares an existing label list (derived-state fast path); the list is
    // trusted to be unique, unlike the checked vector overload.
    PureState(Labels labels, Vector amplitudes);

    static PureState basis_state(std::vector<std::string> labels,
                                 const std::string& which);

    const std::vector<std::string>& labels() const { return *labels_; }
    Labels labels_ptr() const { return labels_; }
    const Vector& amplitudes() const { return amplitudes_; }
    Eigen::Index dim() const { return amplitudes_.size(); }

    Eigen::Index index_of(const std::string& label) const;
    Complex amplitude(const std::string& label) const;
    double probability(const std::string& label) const;
    double norm() const { return amplitudes_.norm(); }

private:
    Labels labels_;
    Vector amplitudes_;
};

struct DensityMatrix {
    std::vector<std::string> labels;
    Matrix matrix;

    static DensityMatrix from_pure(const PureState& psi);

    // Hermiticity / unit trace / positivity check; throws on violation.
    void validate(double tol = 1e-12, double eig_floor = -1e-10) const;
    Eigen::Index index_of(const std::string& label) const;
};

// Two-level rotation R(theta, phi):
//   [[cos(t/2),            -i e^{-i phi} sin(t/2)],
//    [-i e^{i phi} sin(t/2), cos(t/2)]]
struct TwoLevelRotation {
    double theta = 0.0;
    double phi = 0.0;
};

PureState normalize(const PureState& state);

Eigen::Matrix2cd rotation_matrix(const TwoLevelRotation& r);

// Symmetric beam splitter (1/sqrt 2) [[1, i], [i, 1]].
Eigen::Matrix2cd beam_splitter();

bool is_unitary(const Matrix& u, double tol = kUnitaryTol);

// Applies U to the subspace spanned by `targets` (in the given order);
// amplitudes outside the subspace are untouched.
PureState apply_unitary(const PureState& state, const Matrix& u,
                        const std::vector<std::string>& targets);

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<std::string>& targets);

// A measurement partition: each group of labels is one outcome (projector
// onto the span of the group). Groups must tile the state's label set.
using Partition = std::vector<std::vector<std::string>>;

Partition singleton_partition(const std::vector<std::string>& labels);

// Born-rule draw over the partition; returns the outcome index and the
// renormalized projected state.
std::pair<std::size_t, PureState> measure_partition(const PureState& state,
                                                    const Partition& partition,
                                                    RngStream& rng);

// Full projective measurement: every listed label is its own outcome and the
// list must cover the state's label set.
std::pair<std::string, PureState> projective_measure(
    const PureState& state, const std::vector<std::string>& basis,
    RngStream& rng);

// Full measurement in the state's own label order, by index. Identical
// arithmetic and draw usage to the label-based form with basis = labels().
std::pair<Eigen::Index, PureState> measure_in_own_basis(const PureState& state,
                                                        RngStream& rng);

// Phase damping: multiplies matrix elements between different partition
// blocks by exp(-gamma_tau); block-diagonal elements are untouched.
DensityMatrix dephase(const DensityMatrix& rho, double gamma_tau,
                      const Partition& blocks);
DensityMatrix dephase(const DensityMatrix& rho, double gamma_tau,
                      const std::vector<std::string>& basis);

// (1/2) * trace norm of (a - b).
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Haar-ish random unitary from QR of a complex Gaussian matrix.
Matrix random_unitary(Eigen::Index n, RngStream& rng);

}  // namespace suptrap::quantum
