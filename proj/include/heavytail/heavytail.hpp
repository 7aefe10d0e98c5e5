#pragma once

#include "heavytail/dist.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/hypotest.hpp"
#include "heavytail/montecarlo.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/statistic.hpp"
