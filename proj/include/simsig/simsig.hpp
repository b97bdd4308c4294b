#pragma once

// Umbrella header for the simsig library: detection of weak positive latent
// dependence between two paired sequences of test statistics.

#include "simsig/baselines.hpp"
#include "simsig/boundary.hpp"
#include "simsig/dstat.hpp"
#include "simsig/errors.hpp"
#include "simsig/inference.hpp"
#include "simsig/normal.hpp"
#include "simsig/pairs.hpp"
#include "simsig/parallel.hpp"
#include "simsig/rng.hpp"
#include "simsig/simulation.hpp"
#include "simsig/tsv.hpp"
