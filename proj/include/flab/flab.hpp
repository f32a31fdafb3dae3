#pragma once

#include "flab/error.hpp"
#include "flab/free_group.hpp"
#include "flab/entropy_value.hpp"
#include "flab/partition.hpp"
#include "flab/fp_linear.hpp"
#include "flab/finite_group.hpp"
#include "flab/algebraic_shift.hpp"
#include "flab/process.hpp"
#include "flab/f_invariant.hpp"
#include "flab/skew_product.hpp"
#include "flab/report.hpp"
#include "flab/runs.hpp"
