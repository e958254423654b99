// chirplat — chirped-drive discrete nonlinear Schrodinger lattice toolkit.

#pragma once

#include "chirplat/experiment.hpp"
#include "chirplat/io.hpp"
#include "chirplat/lattice.hpp"
#include "chirplat/modes.hpp"
#include "chirplat/params.hpp"
#include "chirplat/rays.hpp"
#include "chirplat/regimes.hpp"
#include "chirplat/rk45.hpp"
