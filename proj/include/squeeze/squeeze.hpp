#pragma once

#include "squeeze/ball.hpp"
#include "squeeze/constants.hpp"
#include "squeeze/elliptic.hpp"
#include "squeeze/errors.hpp"
#include "squeeze/evolution.hpp"
#include "squeeze/grid.hpp"
#include "squeeze/model.hpp"
#include "squeeze/nonlinearity.hpp"
#include "squeeze/norms.hpp"
#include "squeeze/random_fields.hpp"
#include "squeeze/semigroup.hpp"
#include "squeeze/state.hpp"
#include "squeeze/transform.hpp"
#include "squeeze/verification/dense_elliptic.hpp"
#include "squeeze/verification/estimate_suite.hpp"
#include "squeeze/verification/oracle_report.hpp"
#include "squeeze/verification/rk4.hpp"
