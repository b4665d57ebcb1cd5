#pragma once

#include "mrt/coherence.hpp"
#include "mrt/config.hpp"
#include "mrt/csv.hpp"
#include "mrt/dynamics.hpp"
#include "mrt/errors.hpp"
#include "mrt/faddeeva.hpp"
#include "mrt/interpolation.hpp"
#include "mrt/oracle.hpp"
#include "mrt/quadrature.hpp"
#include "mrt/random.hpp"
#include "mrt/rates.hpp"
#include "mrt/scenario.hpp"
#include "mrt/spectral.hpp"
#include "mrt/two_state.hpp"
#include "mrt/validation.hpp"
