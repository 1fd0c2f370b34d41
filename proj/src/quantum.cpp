#include "suptrap/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace suptrap::quantum {

namespace {

const Complex kI{0.0, 1.0};

void check_labels_unique(const std::vector<std::string>& labels) {
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size())
        throw std::invalid_argument("basis labels must be unique");
}

// Returns amplitudes scaled to unit norm when drift warrants it; throws past
// the hard limit.
Vector enforce_norm_policy(const Vector& amplitudes) {
    const double n = amplitudes.norm();
    const double drift = std::abs(n - 1.0);
    if (drift <= kNormRepair) return amplitudes;
    if (drift <= kNormHardLimit) return amplitudes / n;
    throw std::runtime_error("state norm drifted beyond hard limit: " +
                             std::to_string(n));
}

}  // namespace

PureState::PureState(std::vector<std::string> labels, Vector amplitudes)
    : PureState(std::make_shared<const std::vector<std::string>>(std::move(labels)),
                std::move(amplitudes)) {
    check_labels_unique(*labels_);
}

PureState::PureState(Labels labels, Vector amplitudes)
    : labels_(std::move(labels)), amplitudes_(std::move(amplitudes)) {
    if (!labels_ || static_cast<Eigen::Index>(labels_->size()) != amplitudes_.size())
        throw std::invalid_argument("label/amplitude size mismatch");
    if (labels_->empty())
        throw std::invalid_argument("state needs at least one basis label");
    if (!amplitudes_.allFinite())
        throw std::invalid_argument("amplitudes must be finite");
}

PureState PureState::basis_state(std::vector<std::string> labels,
                                 const std::string& which) {
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(labels.size()));
    PureState s(std::move(labels), std::move(amps));
    Vector v = s.amplitudes_;
    v[s.index_of(which)] = 1.0;
    return PureState(s.labels_, std::move(v));
}

Eigen::Index PureState::index_of(const std::string& label) const {
    auto it = std::find(labels_->begin(), labels_->end(), label);
    if (it == labels_->end())
        throw std::invalid_argument("unknown basis label: " + label);
    return static_cast<Eigen::Index>(it - labels_->begin());
}

Complex PureState::amplitude(const std::string& label) const {
    return amplitudes_[index_of(label)];
}

double PureState::probability(const std::string& label) const {
    return std::norm(amplitude(label));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    const Vector a = enforce_norm_policy(psi.amplitudes());
    return DensityMatrix{psi.labels(), a * a.adjoint()};
}

Eigen::Index DensityMatrix::index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
        throw std::invalid_argument("unknown basis label: " + label);
    return static_cast<Eigen::Index>(it - labels.begin());
}

void DensityMatrix::validate(double tol, double eig_floor) const {
    if (matrix.rows() != matrix.cols() ||
        matrix.rows() != static_cast<Eigen::Index>(labels.size()))
        throw std::invalid_argument("density matrix shape/label mismatch");
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::runtime_error("density matrix not Hermitian");
    if (std::abs(matrix.trace().real() - 1.0) > tol ||
        std::abs(matrix.trace().imag()) > tol)
        throw std::runtime_error("density matrix trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix);
    if (es.eigenvalues().minCoeff() < eig_floor)
        throw std::runtime_error("density matrix has negative eigenvalue");
}

PureState normalize(const PureState& state) {
    const double n = state.norm();
    if (n < 1e-150) throw std::invalid_argument("degenerate state");
    return PureState(state.labels(), state.amplitudes() / n);
}

Eigen::Matrix2cd rotation_matrix(const TwoLevelRotation& r) {
    const double c = std::cos(r.theta / 2.0);
    const double s = std::sin(r.theta / 2.0);
    Eigen::Matrix2cd m;
    m << c, -kI * std::polar(1.0, -r.phi) * s,
        -kI * std::polar(1.0, r.phi) * s, c;
    return m;
}

Eigen::Matrix2cd beam_splitter() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd m;
    m << 1.0, kI, kI, 1.0;
    return inv_sqrt2 * m;
}

bool is_unitary(const Matrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    const Matrix delta =
        u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
    return delta.cwiseAbs().maxCoeff() <= tol;
}

namespace {

std::vector<Eigen::Index> target_indices(const PureState& state,
                                         const std::vector<std::string>& targets) {
    check_labels_unique(targets);
    std::vector<Eigen::Index> idx;
    idx.reserve(targets.size());
    for (const auto& t : targets) idx.push_back(state.index_of(t));
    return idx;
}

}  // namespace

PureState apply_unitary(const PureState& state, const Matrix& u,
                        const std::vector<std::string>& targets) {
    if (static_cast<std::size_t>(u.rows()) != targets.size())
        throw std::invalid_argument("unitary dimension does not match target labels");
    if (!is_unitary(u)) throw std::invalid_argument("matrix is not unitary");

    const auto idx = target_indices(state, targets);
    Vector amps = enforce_norm_policy(state.amplitudes());
    Vector sub(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) sub[static_cast<Eigen::Index>(k)] = amps[idx[k]];
    Vector out = u * sub;
    for (std::size_t k = 0; k < idx.size(); ++k) amps[idx[k]] = out[static_cast<Eigen::Index>(k)];
    return PureState(state.labels_ptr(), std::move(amps));
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<std::string>& targets) {
    if (static_cast<std::size_t>(u.rows()) != targets.size())
        throw std::invalid_argument("unitary dimension does not match target labels");
    if (!is_unitary(u)) throw std::invalid_argument("matrix is not unitary");

    const Eigen::Index dim = rho.matrix.rows();
    Matrix full = Matrix::Identity(dim, dim);
    std::vector<Eigen::Index> idx;
    for (const auto& t : targets) idx.push_back(rho.index_of(t));
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
            full(idx[a], idx[b]) = u(static_cast<Eigen::Index>(a),
                                     static_cast<Eigen::Index>(b));
    return DensityMatrix{rho.labels, full * rho.matrix * full.adjoint()};
}

Partition singleton_partition(const std::vector<std::string>& labels) {
    Partition p;
    p.reserve(labels.size());
    for (const auto& l : labels) p.push_back({l});
    return p;
}

namespace {

void check_partition(const std::vector<std::string>& labels,
                     const Partition& partition) {
    std::set<std::string> covered;
    std::size_t total = 0;
    for (const auto& group : partition) {
        for (const auto& l : group) {
            covered.insert(l);
            ++total;
        }
    }
    if (total != labels.size() || covered.size() != labels.size() ||
        !std::all_of(labels.begin(), labels.end(),
                     [&](const std::string& l) { return covered.count(l) > 0; }))
        throw std::invalid_argument("partition does not tile the state's label set");
}

}  // namespace

std::pair<std::size_t, PureState> measure_partition(const PureState& state,
                                                    const Partition& partition,
                                                    RngStream& rng) {
    check_partition(state.labels(), partition);
    const Vector amps = enforce_norm_policy(state.amplitudes());

    std::vector<double> probs(partition.size(), 0.0);
    double total = 0.0;
    for (std::size_t g = 0; g < partition.size(); ++g) {
        for (const auto& l : partition[g])
            probs[g] += std::norm(amps[state.index_of(l)]);
        total += probs[g];
    }

    const double u = rng.uniform() * total;
    double cum = 0.0;
    std::size_t outcome = partition.size() - 1;
    for (std::size_t g = 0; g < partition.size(); ++g) {
        cum += probs[g];
        if (u < cum) {
            outcome = g;
            break;
        }
    }

    Vector projected = Vector::Zero(amps.size());
    for (const auto& l : partition[outcome]) {
        const Eigen::Index i = state.index_of(l);
        projected[i] = amps[i];
    }
    projected /= std::sqrt(probs[outcome]);
    return {outcome, PureState(state.labels_ptr(), std::move(projected))};
}

std::pair<Eigen::Index, PureState> measure_in_own_basis(const PureState& state,
                                                        RngStream& rng) {
    const Vector amps = enforce_norm_policy(state.amplitudes());
    const Eigen::Index dim = amps.size();

    double total = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) total += std::norm(amps[i]);

    const double u = rng.uniform() * total;
    double cum = 0.0;
    Eigen::Index outcome = dim - 1;
    for (Eigen::Index i = 0; i < dim; ++i) {
        cum += std::norm(amps[i]);
        if (u < cum) {
            outcome = i;
            break;
        }
    }

    Vector projected = Vector::Zero(dim);
    projected[outcome] = amps[outcome] / std::sqrt(std::norm(amps[outcome]));
    return {outcome, PureState(state.labels_ptr(), std::move(projected))};
}

std::pair<std::string, PureState> projective_measure(
    const PureState& state, const std::vector<std::string>& basis,
    RngStream& rng) {
    if (basis == state.labels()) {
        auto [i, post] = measure_in_own_basis(state, rng);
        return {basis[static_cast<std::size_t>(i)], std::move(post)};
    }
    auto [g, post] = measure_partition(state, singleton_partition(basis), rng);
    return {basis[g], std::move(post)};
}

DensityMatrix dephase(const DensityMatrix& rho, double gamma_tau,
                      const Partition& blocks) {
    if (gamma_tau < 0.0)
        throw std::invalid_argument("dephase: gamma_tau must be nonnegative");
    check_partition(rho.labels, blocks);

    const Eigen::Index dim = rho.matrix.rows();
    std::vector<std::size_t> block_of(static_cast<std::size_t>(dim));
    for (std::size_t g = 0; g < blocks.size(); ++g)
        for (const auto& l : blocks[g])
            block_of[static_cast<std::size_t>(rho.index_of(l))] = g;

    const double factor = std::exp(-gamma_tau);
    Matrix out = rho.matrix;
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            if (block_of[static_cast<std::size_t>(i)] !=
                block_of[static_cast<std::size_t>(j)])
                out(i, j) *= factor;
    return DensityMatrix{rho.labels, std::move(out)};
}

DensityMatrix dephase(const DensityMatrix& rho, double gamma_tau,
                      const std::vector<std::string>& basis) {
    return dephase(rho, gamma_tau, singleton_partition(basis));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.labels != b.labels)
        throw std::invalid_argument("trace_distance: label mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix - b.matrix);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Matrix random_unitary(Eigen::Index n, RngStream& rng) {
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            g(i, j) = Complex(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix column phases so the distribution is Haar.
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1.0, 0.0);
    }
    return q;
}

}  // namespace suptrap::quantum
