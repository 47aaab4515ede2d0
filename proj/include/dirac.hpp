#pragma once

#include "dirac/core.hpp"
#include "dirac/jalgebra.hpp"
#include "dirac/potential.hpp"
#include "dirac/direct.hpp"
#include "dirac/snode.hpp"
#include "dirac/taylor.hpp"
#include "dirac/inverse.hpp"
#include "dirac/suite.hpp"
