#ifndef ORLICZ_ORLICZ_HPP
#define ORLICZ_ORLICZ_HPP

#include "orlicz/errors.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/expression.hpp"
#include "orlicz/scalar_field.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/report.hpp"
#include "orlicz/phi_props.hpp"
#include "orlicz/mono_ineq.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/modular.hpp"
#include "orlicz/discrete_operator.hpp"
#include "orlicz/solver.hpp"
#include "orlicz/probes.hpp"
#include "orlicz/config.hpp"
#include "orlicz/run.hpp"

#endif  // ORLICZ_ORLICZ_HPP
