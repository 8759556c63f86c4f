#pragma once

// Umbrella header for the stl-synth trajectory synthesis library.

#include "stlsynth/formula.hpp"
#include "stlsynth/tree.hpp"
#include "stlsynth/parser.hpp"
#include "stlsynth/system.hpp"
#include "stlsynth/model.hpp"
#include "stlsynth/encoder.hpp"
#include "stlsynth/simplex.hpp"
#include "stlsynth/bnb.hpp"
#include "stlsynth/lp_io.hpp"
#include "stlsynth/solve.hpp"
#include "stlsynth/scenarios.hpp"
#include "stlsynth/bench.hpp"
#include "stlsynth/plot.hpp"
