#pragma once

// Umbrella header: implicit universal solutions of weight-one variational
// problems, their stationarity checks, and the verification campaign.

#include "varsol/autodiff.hpp"
#include "varsol/builtins.hpp"
#include "varsol/campaign.hpp"
#include "varsol/errors.hpp"
#include "varsol/expr.hpp"
#include "varsol/firstorder.hpp"
#include "varsol/hierarchy.hpp"
#include "varsol/implicit.hpp"
#include "varsol/jet.hpp"
#include "varsol/lagrangian.hpp"
#include "varsol/linalg.hpp"
#include "varsol/multifield.hpp"
#include "varsol/rng.hpp"
