#pragma once

#include "satcl/algorithms.hpp"
#include "satcl/cl_engine.hpp"
#include "satcl/criteria.hpp"
#include "satcl/equivalence.hpp"
#include "satcl/error.hpp"
#include "satcl/experiment.hpp"
#include "satcl/generators.hpp"
#include "satcl/geometry.hpp"
#include "satcl/lp.hpp"
#include "satcl/rational.hpp"
#include "satcl/rng.hpp"
#include "satcl/task_io.hpp"
