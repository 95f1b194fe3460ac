#pragma once

// Umbrella header for the numerical library. The config and runner headers
// additionally need the bundled TOML and JSON parsers.

#include "hrv/errors.hpp"
#include "hrv/harness.hpp"
#include "hrv/measures.hpp"
#include "hrv/oracles.hpp"
#include "hrv/points.hpp"
#include "hrv/reference.hpp"
#include "hrv/rng.hpp"
#include "hrv/samplers.hpp"
#include "hrv/scaling.hpp"
#include "hrv/selfcheck.hpp"
#include "hrv/spaces.hpp"
#include "hrv/transforms.hpp"
