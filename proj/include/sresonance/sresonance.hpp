#pragma once

#include "sresonance/diffusion.hpp"
#include "sresonance/errors.hpp"
#include "sresonance/estimators.hpp"
#include "sresonance/expression.hpp"
#include "sresonance/invariant_law.hpp"
#include "sresonance/map_test.hpp"
#include "sresonance/numerics.hpp"
#include "sresonance/parallel.hpp"
#include "sresonance/resonance.hpp"
#include "sresonance/simulator.hpp"
