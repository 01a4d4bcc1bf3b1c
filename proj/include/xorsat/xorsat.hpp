#pragma once

#include "bench.hpp"
#include "cnf.hpp"
#include "diversity.hpp"
#include "metrics.hpp"
#include "mutate.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "solver.hpp"
