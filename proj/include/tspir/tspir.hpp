#pragma once

#include "tspir/errors.hpp"
#include "tspir/field.hpp"
#include "tspir/grs.hpp"
#include "tspir/metrics.hpp"
#include "tspir/privacy.hpp"
#include "tspir/rational.hpp"
#include "tspir/rng.hpp"
#include "tspir/scheme.hpp"
#include "tspir/sim.hpp"
