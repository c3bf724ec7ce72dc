#ifndef MAXW_MAXW_HPP
#define MAXW_MAXW_HPP

#include "model.hpp"
#include "jps.hpp"
#include "propagation.hpp"
#include "solver.hpp"
#include "lazy.hpp"
#include "checker.hpp"
#include "io.hpp"
#include "gen.hpp"
#include "bench.hpp"

#endif
