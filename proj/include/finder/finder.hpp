#pragma once

// Umbrella header for the full multi-object-search stack.

#include "finder/benchmark.hpp"
#include "finder/config.hpp"
#include "finder/frontier.hpp"
#include "finder/grid.hpp"
#include "finder/mapping.hpp"
#include "finder/metrics.hpp"
#include "finder/pathing.hpp"
#include "finder/pgm.hpp"
#include "finder/planner.hpp"
#include "finder/rng.hpp"
#include "finder/scenario_io.hpp"
#include "finder/scoremap.hpp"
#include "finder/similarity.hpp"
#include "finder/stats.hpp"
#include "finder/textio.hpp"
#include "finder/world.hpp"
#include "finder/worldgen.hpp"
