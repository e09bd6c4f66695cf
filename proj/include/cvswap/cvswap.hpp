#pragma once

#include "cvswap/errors.hpp"
#include "cvswap/numerics/dense.hpp"
#include "cvswap/numerics/quadrature.hpp"
#include "cvswap/numerics/simplex.hpp"
#include "cvswap/polynomial.hpp"
#include "cvswap/gauss_poly_cf.hpp"
#include "cvswap/states.hpp"
#include "cvswap/fock.hpp"
#include "cvswap/swapping.hpp"
#include "cvswap/swap_oracle.hpp"
#include "cvswap/teleportation.hpp"
#include "cvswap/optimizer.hpp"
