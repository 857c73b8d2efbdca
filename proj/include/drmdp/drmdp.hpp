#pragma once

#include "drmdp/benchmarks.hpp"
#include "drmdp/divergence_cost.hpp"
#include "drmdp/errors.hpp"
#include "drmdp/experiments.hpp"
#include "drmdp/fk_dual.hpp"
#include "drmdp/kl_dual.hpp"
#include "drmdp/mdp.hpp"
#include "drmdp/model_io.hpp"
#include "drmdp/numeric.hpp"
#include "drmdp/oracle.hpp"
#include "drmdp/robust_bellman.hpp"
#include "drmdp/sampling.hpp"
#include "drmdp/uncertainty.hpp"
#include "drmdp/value_iteration.hpp"
