/// @file state.hpp
/// @brief Value-semantic snapshot advanced by the pressure-correction scheme.
#pragma once

#include "baropc/fields.hpp"

namespace baropc {

struct SchemeState {
    double t = 0.0;
    VelocityField u;
    CellField p;
    CellField rho;
    /// Predicted edge density of the step that produced this state; enters the
    /// weighted pressure semi-norm of the energy bound.
    EdgeScalarField rho_tilde;
};

} // namespace baropc
