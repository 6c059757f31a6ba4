#pragma once

// Umbrella header for the gwright library.
//
// Pulls in every public module: special functions and quadrature,
// the generalized Wright series and its Mellin-Barnes dual, mixing
// densities and samplers, the scale-mixture measure, the associated
// orthogonal polynomial family, pairing transforms, Monte Carlo
// estimators, and parameter-file IO.

#include "gwright/errors.hpp"
#include "gwright/complex_gamma.hpp"
#include "gwright/quadrature.hpp"
#include "gwright/rng.hpp"
#include "gwright/foxh.hpp"
#include "gwright/wright.hpp"
#include "gwright/fhdam.hpp"
#include "gwright/measure.hpp"
#include "gwright/polynomials.hpp"
#include "gwright/donsker.hpp"
#include "gwright/oracles.hpp"
#include "gwright/param_io.hpp"
