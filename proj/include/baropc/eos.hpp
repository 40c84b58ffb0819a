/// @file eos.hpp
/// @brief Barotropic equations of state rho = varrho(p), their inverses, and
/// the associated elastic potentials P with P'(z) = wp(z) / z^2.
#pragma once

#include <functional>
#include <string>

#include "baropc/operators.hpp"

namespace baropc {

enum class EosKind {
    Affine, ///< rho = 1 + gamma Ma^2 p
    Power,  ///< p = rho^gamma, gamma > 1
    Linear, ///< p = rho (isothermal, the gamma = 1 power law)
};

class EquationOfState {
public:
    static EquationOfState affine(double gamma, double mach);
    /// gamma == 1 yields the linear (isothermal) law.
    static EquationOfState power(double gamma);
    static EquationOfState linear();

    EosKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    double mach() const { return mach_; }
    std::string name() const;

    /// Pressures at which the density is defined and strictly positive.
    bool admissible_pressure(double p) const;

    double density(double p) const;            ///< varrho(p)
    double density_derivative(double p) const; ///< varrho'(p)
    double pressure(double rho) const;         ///< wp(rho), inverse of varrho
    /// P(rho). The affine law is anchored at P(1) = 0 since the integral from
    /// zero diverges; power laws use P(rho) = rho^(gamma-1) / (gamma-1) and
    /// the linear law P = log(rho).
    double potential(double rho) const;
    double potential_derivative(double rho) const; ///< P'(rho)
    double energy(double rho) const;               ///< rho P(rho)
    double energy_derivative(double rho) const;    ///< (rho P(rho))'

private:
    EquationOfState(EosKind kind, double gamma, double mach) : kind_(kind), gamma_(gamma), mach_(mach) {}
    void require_positive_density(double rho, const char* where) const;

    EosKind kind_;
    double gamma_;
    double mach_;
};

/// Strictly convex, C^1 function handle for the face-density construction.
struct ConvexFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// The unique rho_bar with g(a) + g'(a)(rho_bar - a) = g(b) + g'(b)(rho_bar - b);
/// equal inputs return that value. The result lies in [min(a,b), max(a,b)].
double rho_bar_sigma(const ConvexFunction& g, double rho_k, double rho_l);

/// z -> rho P(rho) of `eos` as a convex function handle.
ConvexFunction energy_function(const EquationOfState& eos);

} // namespace baropc
