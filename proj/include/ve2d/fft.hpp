#pragma once

#include "ve2d/field.hpp"

namespace ve2d {

/// Forward real-to-complex transform, normalized by 1/n^2.
Spectrum to_spectral(const ScalarField& f);
/// Inverse complex-to-real transform. The input is left untouched.
ScalarField to_physical(const Spectrum& s);

}  // namespace ve2d
