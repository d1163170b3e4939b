#pragma once

// Umbrella header: the whole library in one include.

#include "psdot/commands.hpp"
#include "psdot/coupling.hpp"
#include "psdot/covariance.hpp"
#include "psdot/errors.hpp"
#include "psdot/field.hpp"
#include "psdot/field_io.hpp"
#include "psdot/grid.hpp"
#include "psdot/hellinger.hpp"
#include "psdot/hermlin.hpp"
#include "psdot/morph.hpp"
#include "psdot/random.hpp"
#include "psdot/rational.hpp"
