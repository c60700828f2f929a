#pragma once

// Umbrella header for the whole library.

#include "cbi/constraints.hpp"
#include "cbi/error.hpp"
#include "cbi/feasibility.hpp"
#include "cbi/grid.hpp"
#include "cbi/gsn.hpp"
#include "cbi/inference.hpp"
#include "cbi/measures.hpp"
#include "cbi/objective.hpp"
#include "cbi/operational.hpp"
#include "cbi/oracle.hpp"
#include "cbi/solver.hpp"
#include "cbi/verification.hpp"
