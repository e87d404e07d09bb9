#include "qnm/channels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnm/errors.hpp"

namespace qnm {

namespace {

void require_pair_layout(const Dims& dims, const char* what) {
    if (dims != Dims{2, 2}) throw DimensionError(std::string(what) + ": expected (S, A) layout (2, 2)");
}

void require_complete(const KrausSet& ks, const char* what) {
    const double dev = validate_cptp(ks);
    if (dev > kCompletenessTol) {
        throw InvariantError(std::string(what) + ": Kraus set is not trace preserving (deviation " +
                             std::to_string(dev) + ")");
    }
}

} // namespace

KrausSet::KrausSet(std::vector<Matrix> operators) : ops_(std::move(operators)) {
    if (ops_.empty()) throw DimensionError("KrausSet: no operators");
    for (const Matrix& k : ops_) {
        if (k.rows() != k.cols() || static_cast<std::size_t>(k.rows()) != kSystemDim) {
            throw DimensionError("KrausSet: operators must be 2x2");
        }
    }
}

KrausSet KrausSet::identity() {
    return KrausSet({qnm::identity(kSystemDim)});
}

double validate_cptp(const KrausSet& ks) {
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(ks.sys_dim()), static_cast<Eigen::Index>(ks.sys_dim()));
    for (const Matrix& k : ks.operators()) sum += k.adjoint() * k;
    return (sum - qnm::identity(ks.sys_dim())).cwiseAbs().maxCoeff();
}

void GadParams::validate() const {
    if (!std::isfinite(omega)) throw DomainError("GadParams: omega must be finite");
    if (!(t_c >= 0.0) || !std::isfinite(t_c)) throw DomainError("GadParams: t_c must be finite and >= 0");
}

double effective_time(double t, double t_c) {
    if (!(t >= 0.0)) throw DomainError("effective_time: t must be >= 0");
    if (!(t_c >= 0.0)) throw DomainError("effective_time: t_c must be >= 0");
    return std::min(t, t_c);
}

double gad_mixing(double t_eff, double omega) {
    const double c = std::cos(omega * t_eff);
    return c * c;
}

double gad_decay(double t_eff) {
    return std::exp(-t_eff);
}

KrausSet gad_kraus(double t, const GadParams& p) {
    p.validate();
    const double te = effective_time(t, p.t_c);
    const double s = gad_mixing(te, p.omega);
    const double r = gad_decay(te);
    const double ss = std::sqrt(s);
    const double sc = std::sqrt(1.0 - s);
    const double sr = std::sqrt(r);
    const double sd = std::sqrt(1.0 - r);

    Matrix k1(2, 2), k2(2, 2), k3(2, 2), k4(2, 2);
    k1 << ss, 0.0, 0.0, ss * sr;
    k2 << 0.0, ss * sd, 0.0, 0.0;
    k3 << sc * sr, 0.0, 0.0, sc;
    k4 << 0.0, 0.0, sc * sd, 0.0;
    return KrausSet({k1, k2, k3, k4});
}

DynamicalMap DynamicalMap::identity() {
    return DynamicalMap([](double) { return KrausSet::identity(); });
}

DynamicalMap DynamicalMap::gad(GadParams p) {
    p.validate();
    return DynamicalMap([p](double t) { return gad_kraus(t, p); });
}

DensityMatrix apply_to_system(const KrausSet& ks, const DensityMatrix& rho_sa) {
    require_pair_layout(rho_sa.dims(), "apply_to_system");
    if (ks.sys_dim() != kSystemDim) throw DimensionError("apply_to_system: Kraus operators must act on a qubit");
    require_complete(ks, "apply_to_system");

    const Matrix id_a = qnm::identity(2);
    Matrix out = Matrix::Zero(4, 4);
    for (const Matrix& k : ks.operators()) {
        const Matrix full = tensor(k, id_a);
        out += full * rho_sa.matrix() * full.adjoint();
    }
    return DensityMatrix(std::move(out), rho_sa.dims());
}

PureState purify(const KrausSet& ks, const PureState& psi_sa) {
    require_pair_layout(psi_sa.dims(), "purify");
    if (ks.size() > kEnvironmentDim) {
        throw DimensionError("purify: at most 4 Kraus operators fit the environment");
    }
    require_complete(ks, "purify");

    const Matrix id_a = qnm::identity(2);
    const auto env = static_cast<Eigen::Index>(kEnvironmentDim);
    Vector out = Vector::Zero(4 * env);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const Vector branch = tensor(ks.operators()[i], id_a) * psi_sa.amplitudes();
        for (Eigen::Index sa = 0; sa < 4; ++sa) out[sa * env + static_cast<Eigen::Index>(i)] = branch[sa];
    }
    // Norm equals 1 up to the completeness residual; renormalize that away.
    out /= out.norm();
    return PureState(std::move(out), Dims{2, 2, kEnvironmentDim});
}

KrausSet random_kraus_set(std::size_t n_ops, std::mt19937_64& rng) {
    if (n_ops == 0 || n_ops > 8) throw DimensionError("random_kraus_set: need 1..8 operators");
    const auto rows = static_cast<Eigen::Index>(2 * n_ops);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(rows, 2);
    for (Eigen::Index c = 0; c < 2; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    const Matrix isometry = qr.householderQ() * Matrix::Identity(rows, 2);
    std::vector<Matrix> ops;
    ops.reserve(n_ops);
    for (std::size_t i = 0; i < n_ops; ++i) ops.emplace_back(isometry.block(static_cast<Eigen::Index>(2 * i), 0, 2, 2));
    return KrausSet(std::move(ops));
}

} // namespace qnm
