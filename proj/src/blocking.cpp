#include "blocksymm/blocking.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "blocksymm/errors.hpp"
#include "blocksymm/rng.hpp"

namespace blocksymm {

std::vector<BlockScheme::Range> BlockScheme::blocks() const {
    std::vector<Range> out;
    out.reserve(count());
    for (std::size_t l = 0; l < count(); ++l) out.push_back(block(l));
    return out;
}

BlockScheme make_blocks(std::size_t n, std::size_t b) {
    if (n < 1) throw ValidationError("scheme.n", "sample size must be >= 1");
    if (b < 1 || b > n) throw ValidationError("scheme.b", "block size must lie in [1, n]");
    if (n % b != 0) throw ValidationError("scheme.b", "block size must divide n");
    return BlockScheme(n, b);
}

std::ostream& operator<<(std::ostream& out, const BlockScheme& scheme) {
    out << "BlockScheme(n=" << scheme.n() << ", b=" << scheme.block_length()
        << ", N=" << scheme.count() << "):";
    for (const auto& r : scheme.blocks()) out << " {" << (r.first + 1) << ".." << r.last << "}";
    return out;
}

double MultiplierSpec::bound() const noexcept {
    switch (kind) {
        case MultiplierKind::UniformSym: return std::sqrt(3.0);
        case MultiplierKind::Rademacher:
        case MultiplierKind::Unit: return 1.0;
    }
    return 1.0;
}

std::string MultiplierSpec::name() const {
    switch (kind) {
        case MultiplierKind::Rademacher: return "rademacher";
        case MultiplierKind::UniformSym: return "uniform_sym";
        case MultiplierKind::Unit: return "unit";
    }
    return "unknown";
}

Matrix block_sums(const PanelSample& sample, const BlockScheme& scheme) {
    if (sample.n() != scheme.n())
        throw ValidationError("scheme.n", "block scheme and panel disagree on n");
    const auto count = static_cast<Eigen::Index>(scheme.count());
    const auto p = sample.data.cols();
    Matrix sums = Matrix::Zero(count, p);
    for (Eigen::Index l = 0; l < count; ++l) {
        const auto range = scheme.block(static_cast<std::size_t>(l));
        for (auto t = static_cast<Eigen::Index>(range.first);
             t < static_cast<Eigen::Index>(range.last); ++t)
            sums.row(l) += sample.data.row(t);
    }
    return sums;
}

std::vector<double> draw_multipliers(const MultiplierSpec& spec, std::size_t count,
                                     std::uint64_t seed) {
    if (count < 1) throw ValidationError("multiplier.count", "need at least one multiplier");
    std::vector<double> eps(count);
    auto engine = rng::make_engine(seed);
    switch (spec.kind) {
        case MultiplierKind::Rademacher:
            for (auto& e : eps) e = (engine() >> 63) != 0 ? 1.0 : -1.0;
            break;
        case MultiplierKind::UniformSym: {
            std::uniform_real_distribution<double> uniform(-std::sqrt(3.0), std::sqrt(3.0));
            for (auto& e : eps) e = uniform(engine);
            break;
        }
        case MultiplierKind::Unit:
            for (auto& e : eps) e = 1.0;
            break;
    }
    return eps;
}

std::vector<double> expand_multipliers(std::span<const double> eps, const BlockScheme& scheme) {
    if (eps.size() != scheme.count())
        throw ValidationError("multiplier.count", "need one multiplier per block");
    std::vector<double> eta(scheme.n());
    for (std::size_t l = 0; l < scheme.count(); ++l) {
        const auto range = scheme.block(l);
        for (std::size_t t = range.first; t < range.last; ++t) eta[t] = eps[l];
    }
    return eta;
}

double max_abs_mean(const PanelSample& sample) {
    if (sample.data.size() == 0) return 0.0;
    return (sample.data.colwise().sum().cwiseAbs() / static_cast<double>(sample.n())).maxCoeff();
}

double multiplier_max_abs_mean(const PanelSample& sample, const BlockScheme& scheme,
                               std::span<const double> eps) {
    if (eps.size() != scheme.count())
        throw ValidationError("multiplier.count", "need one multiplier per block");
    const Matrix sums = block_sums(sample, scheme);
    const Eigen::Map<const Vector> weights(eps.data(), static_cast<Eigen::Index>(eps.size()));
    const Eigen::RowVectorXd combined = weights.transpose() * sums;
    return combined.cwiseAbs().maxCoeff() / static_cast<double>(sample.n());
}

double block_quadratic_max(const PanelSample& sample, const BlockScheme& scheme, double q) {
    const Matrix sums = block_sums(sample, scheme);
    const double top = sums.colwise().squaredNorm().maxCoeff() / static_cast<double>(sample.n());
    return std::pow(top, q / 2.0);
}

}  // namespace blocksymm
