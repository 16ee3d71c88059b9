#pragma once

// Umbrella header: statistical tests that decide, from high-frequency
// observations of one path, whether its jump component has finitely or
// infinitely many jumps, together with the simulation engine and tick-data
// pipeline used to validate and apply them.

#include "jumpact/common.hpp"
#include "jumpact/config_io.hpp"
#include "jumpact/ingest.hpp"
#include "jumpact/moments.hpp"
#include "jumpact/monte_carlo.hpp"
#include "jumpact/normal.hpp"
#include "jumpact/path_series.hpp"
#include "jumpact/report_io.hpp"
#include "jumpact/rng.hpp"
#include "jumpact/simulator.hpp"
#include "jumpact/statistics.hpp"
