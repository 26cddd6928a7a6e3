#pragma once

// One include for the whole toolkit.

#include "gm/errors.hpp"
#include "gm/grid.hpp"
#include "gm/sparse.hpp"
#include "gm/dense.hpp"
#include "gm/linalg.hpp"
#include "gm/barriers.hpp"
#include "gm/solver.hpp"
#include "gm/multiroot.hpp"
#include "gm/study.hpp"
#include "gm/config.hpp"
