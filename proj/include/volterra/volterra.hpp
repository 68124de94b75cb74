#pragma once

#include "volterra/version.hpp"
#include "volterra/error.hpp"
#include "volterra/function_space.hpp"
#include "volterra/csv.hpp"
#include "volterra/kernel.hpp"
#include "volterra/operator.hpp"
#include "volterra/sampling.hpp"
#include "volterra/linear_solver.hpp"
#include "volterra/nonlinear_solver.hpp"
#include "volterra/hypothesis.hpp"
#include "volterra/sensitivity.hpp"
