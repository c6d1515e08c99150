// model.cpp: Network, bath and model validation plus the Ohmic bath functions

#include "heatrect/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace heatrect {

namespace {

constexpr double symmetry_tol = 1e-12;

double relative_asymmetry(const Matrix& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

} // namespace

NetworkSpec::NetworkSpec(Vector masses, Matrix v0)
    : masses_(std::move(masses)), v0_(std::move(v0)) {
    validate();
}

NetworkSpec::NetworkSpec(Vector masses, Matrix v0, std::map<int, CMatrix> harmonics, double omega_d)
    : masses_(std::move(masses)), v0_(std::move(v0)), harmonics_(std::move(harmonics)), omega_d_(omega_d) {
    validate();
}

void NetworkSpec::validate() const {
    const auto n = v0_.rows();
    if (n == 0 || v0_.cols() != n) throw ValidationError("network: v0 must be a non-empty square matrix");
    if (masses_.size() != n) throw ValidationError("network: masses must have one entry per node");
    if (!v0_.allFinite()) throw ValidationError("network: v0 has non-finite entries");
    if ((masses_.array() <= 0.0).any()) throw ValidationError("network: masses must be strictly positive");
    if (relative_asymmetry(v0_) > symmetry_tol) throw ValidationError("network: v0 must be symmetric");

    if (omega_d_.has_value()) {
        if (!(*omega_d_ > 0.0) || !std::isfinite(*omega_d_))
            throw ValidationError("network: omega_d must be positive");
        if (harmonics_.empty()) throw ValidationError("network: driven network needs drive harmonics");
    } else if (!harmonics_.empty()) {
        throw ValidationError("network: drive harmonics given without omega_d");
    }

    for (const auto& [k, vk] : harmonics_) {
        if (k == 0) throw ValidationError("network: harmonic index 0 is reserved for v0");
        if (vk.rows() != n || vk.cols() != n) throw ValidationError("network: harmonic V_k has wrong shape");
        auto partner = harmonics_.find(-k);
        if (partner == harmonics_.end())
            throw ValidationError("network: harmonic " + std::to_string(k) + " has no partner " + std::to_string(-k));
        const double scale = std::max(1.0, vk.cwiseAbs().maxCoeff());
        if ((partner->second - vk.adjoint()).cwiseAbs().maxCoeff() > symmetry_tol * scale)
            throw ValidationError("network: V_{-k} must equal V_k^dagger");
        if ((vk - vk.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale)
            throw ValidationError("network: V_k must be symmetric for a real symmetric V(t)");
    }
}

double NetworkSpec::period() const {
    if (!omega_d_) throw ValidationError("network: static network has no drive period");
    return 2.0 * pi / *omega_d_;
}

int NetworkSpec::max_harmonic() const noexcept {
    int kmax = 0;
    for (const auto& [k, vk] : harmonics_) kmax = std::max(kmax, std::abs(k));
    return kmax;
}

CMatrix NetworkSpec::harmonic(int k) const {
    if (k == 0) return v0_.cast<Complex>();
    auto it = harmonics_.find(k);
    if (it == harmonics_.end()) return CMatrix::Zero(v0_.rows(), v0_.cols());
    return it->second;
}

Matrix NetworkSpec::potential(double t) const {
    Matrix v = v0_;
    if (!omega_d_) return v;
    for (const auto& [k, vk] : harmonics_)
        v += (vk * std::exp(Complex(0.0, k * *omega_d_ * t))).real();
    return v;
}

Matrix NetworkSpec::potential_rate(double t) const {
    Matrix dv = Matrix::Zero(v0_.rows(), v0_.cols());
    if (!omega_d_) return dv;
    for (const auto& [k, vk] : harmonics_)
        dv += (vk * (Complex(0.0, k * *omega_d_) * std::exp(Complex(0.0, k * *omega_d_ * t)))).real();
    return dv;
}

Model::Model(NetworkSpec network, std::vector<BathSpec> baths, Units units)
    : network_(std::move(network)), baths_(std::move(baths)), units_(units) {
    const int n = static_cast<int>(network_.size());
    std::set<int> nodes;
    for (const auto& b : baths_) {
        if (b.node < 0 || b.node >= n) throw ValidationError("model: bath node out of range");
        if (!nodes.insert(b.node).second) throw ValidationError("model: at most one bath per node");
        if (!(b.gamma > 0.0)) throw ValidationError("model: bath gamma must be positive");
        if (!(b.cutoff > 0.0)) throw ValidationError("model: bath cutoff must be positive");
        if (!(b.temperature >= 0.0) || !std::isfinite(b.temperature))
            throw ValidationError("model: bath temperature must be non-negative");
    }
    if (!(units_.omega_ref > 0.0)) throw ValidationError("model: reference frequency must be positive");
}

Model Model::with_temperatures(const std::vector<double>& temperatures) const {
    if (temperatures.size() != baths_.size()) throw ValidationError("model: one temperature per bath expected");
    auto baths = baths_;
    for (std::size_t i = 0; i < baths.size(); ++i) baths[i].temperature = temperatures[i];
    return Model(network_, std::move(baths), units_);
}

Model Model::swapped(std::size_t a, std::size_t b) const {
    if (a >= baths_.size() || b >= baths_.size()) throw ValidationError("model: swap index out of range");
    auto baths = baths_;
    std::swap(baths[a].temperature, baths[b].temperature);
    return Model(network_, std::move(baths), units_);
}

Model Model::with_omega_d(double omega_d) const {
    if (!network_.driven()) throw ValidationError("model: static network has no drive frequency");
    NetworkSpec net(network_.masses(), network_.v0(), network_.harmonics(), omega_d);
    return Model(std::move(net), baths_, units_);
}

Vector Model::temperatures() const {
    Vector t(baths_.size());
    for (std::size_t i = 0; i < baths_.size(); ++i) t[i] = baths_[i].temperature;
    return t;
}

double Model::max_cutoff() const noexcept {
    double c = 0.0;
    for (const auto& b : baths_) c = std::max(c, b.cutoff);
    return c;
}

double Model::min_gamma() const noexcept {
    double g = 0.0;
    for (const auto& b : baths_) g = (g == 0.0) ? b.gamma : std::min(g, b.gamma);
    return g;
}

std::complex<double> susceptibility(const BathSpec& bath, double omega) {
    const double lam = bath.cutoff;
    return 2.0 * bath.gamma * lam * lam / Complex(lam, -omega);
}

Vector node_densities(const Model& model, double omega) {
    Vector j = Vector::Zero(static_cast<Eigen::Index>(model.size()));
    for (const auto& b : model.baths()) j[b.node] = ohmic_density(b, omega);
    return j;
}

Matrix spectral_matrix(const Model& model, double omega) {
    return node_densities(model, omega).asDiagonal();
}

Matrix TwoOscillatorParams::v0() const {
    Matrix v(2, 2);
    v << omega1 * omega1 + c0, -c0,
         -c0, omega2 * omega2 + c0;
    return v;
}

Model TwoOscillatorParams::build() const {
    const Vector masses = Vector::Ones(2);
    std::vector<BathSpec> baths{{0, t1, gamma, cutoff}, {1, t2, gamma, cutoff}};
    if (!omega_d) return Model(NetworkSpec(masses, v0()), std::move(baths));
    CMatrix v = CMatrix::Zero(2, 2);
    v(0, 0) = v1;
    std::map<int, CMatrix> harmonics{{1, v}, {-1, v}};
    return Model(NetworkSpec(masses, v0(), std::move(harmonics), *omega_d), std::move(baths));
}

} // namespace heatrect
