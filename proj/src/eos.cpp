#include "baropc/eos.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace baropc {

EquationOfState EquationOfState::affine(double gamma, double mach) {
    if (!(gamma > 0.0) || !(mach > 0.0) || !std::isfinite(gamma) || !std::isfinite(mach)) {
        throw DomainError("affine equation of state needs gamma > 0 and Ma > 0");
    }
    return {EosKind::Affine, gamma, mach};
}

EquationOfState EquationOfState::power(double gamma) {
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
        throw DomainError("power-law equation of state needs gamma >= 1");
    }
    if (gamma == 1.0) {
        return linear();
    }
    return {EosKind::Power, gamma, 0.0};
}

EquationOfState EquationOfState::linear() { return {EosKind::Linear, 1.0, 0.0}; }

std::string EquationOfState::name() const {
    std::ostringstream os;
    switch (kind_) {
    case EosKind::Affine: os << "affine(gamma=" << gamma_ << ", Ma=" << mach_ << ")"; break;
    case EosKind::Power: os << "power(gamma=" << gamma_ << ")"; break;
    case EosKind::Linear: os << "linear"; break;
    }
    return os.str();
}

bool EquationOfState::admissible_pressure(double p) const {
    if (!std::isfinite(p)) {
        return false;
    }
    if (kind_ == EosKind::Affine) {
        return 1.0 + gamma_ * mach_ * mach_ * p > 0.0;
    }
    return p > 0.0;
}

void EquationOfState::require_positive_density(double rho, const char* where) const {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw DomainError(std::string(where) + ": density must be strictly positive and finite");
    }
}

double EquationOfState::density(double p) const {
    if (!admissible_pressure(p)) {
        throw DomainError("density: pressure outside the admissible range of " + name());
    }
    switch (kind_) {
    case EosKind::Affine: return 1.0 + gamma_ * mach_ * mach_ * p;
    case EosKind::Power: return std::pow(p, 1.0 / gamma_);
    case EosKind::Linear: return p;
    }
    return 0.0;
}

double EquationOfState::density_derivative(double p) const {
    if (!admissible_pressure(p)) {
        throw DomainError("density_derivative: pressure outside the admissible range of " + name());
    }
    switch (kind_) {
    case EosKind::Affine: return gamma_ * mach_ * mach_;
    case EosKind::Power: return std::pow(p, 1.0 / gamma_ - 1.0) / gamma_;
    case EosKind::Linear: return 1.0;
    }
    return 0.0;
}

double EquationOfState::pressure(double rho) const {
    require_positive_density(rho, "pressure");
    switch (kind_) {
    case EosKind::Affine: return (rho - 1.0) / (gamma_ * mach_ * mach_);
    case EosKind::Power: return std::pow(rho, gamma_);
    case EosKind::Linear: return rho;
    }
    return 0.0;
}

double EquationOfState::potential(double rho) const {
    require_positive_density(rho, "potential");
    switch (kind_) {
    case EosKind::Affine: return (std::log(rho) + 1.0 / rho - 1.0) / (gamma_ * mach_ * mach_);
    case EosKind::Power: return std::pow(rho, gamma_ - 1.0) / (gamma_ - 1.0);
    case EosKind::Linear: return std::log(rho);
    }
    return 0.0;
}

double EquationOfState::potential_derivative(double rho) const {
    require_positive_density(rho, "potential_derivative");
    return pressure(rho) / (rho * rho);
}

double EquationOfState::energy(double rho) const { return rho * potential(rho); }

double EquationOfState::energy_derivative(double rho) const {
    require_positive_density(rho, "energy_derivative");
    switch (kind_) {
    case EosKind::Affine: return std::log(rho) / (gamma_ * mach_ * mach_);
    case EosKind::Power: return gamma_ / (gamma_ - 1.0) * std::pow(rho, gamma_ - 1.0);
    case EosKind::Linear: return std::log(rho) + 1.0;
    }
    return 0.0;
}

double rho_bar_sigma(const ConvexFunction& g, double rho_k, double rho_l) {
    if (rho_k == rho_l) {
        return rho_k;
    }
    const double dk = g.derivative(rho_k);
    const double dl = g.derivative(rho_l);
    const double num = g.value(rho_k) - g.value(rho_l) - dk * rho_k + dl * rho_l;
    const double den = dl - dk;
    const double lo = std::min(rho_k, rho_l);
    const double hi = std::max(rho_k, rho_l);
    if (den == 0.0) {
        return 0.5 * (lo + hi);
    }
    // Cancellation for nearly equal inputs may push the quotient a few ulps out.
    return std::clamp(num / den, lo, hi);
}

ConvexFunction energy_function(const EquationOfState& eos) {
    return {[eos](double z) { return eos.energy(z); }, [eos](double z) { return eos.energy_derivative(z); }};
}

} // namespace baropc
