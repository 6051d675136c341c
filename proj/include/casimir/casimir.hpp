#ifndef CASIMIR_CASIMIR_HPP
#define CASIMIR_CASIMIR_HPP

#include "casimir/errors.hpp"
#include "casimir/units.hpp"
#include "casimir/atoms.hpp"
#include "casimir/geometry.hpp"
#include "casimir/tensors.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/finite_difference.hpp"
#include "casimir/radial_operators.hpp"
#include "casimir/matsubara.hpp"
#include "casimir/potentials.hpp"

#endif  // CASIMIR_CASIMIR_HPP
