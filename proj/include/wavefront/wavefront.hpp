#pragma once
// Umbrella header for the wavefront library.

#include "wavefront/core.hpp"
#include "wavefront/cube.hpp"
#include "wavefront/frontier.hpp"
#include "wavefront/io.hpp"
#include "wavefront/lattice.hpp"
#include "wavefront/metrics.hpp"
#include "wavefront/parallel.hpp"
#include "wavefront/surfaces.hpp"
