#pragma once

// Two-view triangulation via the quadric form of the epipolar constraint:
// closed-form weighted correction, the exact degree-6 solver it approximates,
// provable distance bounds relating the two, and the usual baselines.

#include "epiquad/baselines.hpp"
#include "epiquad/benchmark.hpp"
#include "epiquad/bounds.hpp"
#include "epiquad/camera.hpp"
#include "epiquad/critical.hpp"
#include "epiquad/diagonalize.hpp"
#include "epiquad/errors.hpp"
#include "epiquad/fundamental.hpp"
#include "epiquad/io.hpp"
#include "epiquad/polynomial.hpp"
#include "epiquad/rng.hpp"
#include "epiquad/synthetic.hpp"
#include "epiquad/types.hpp"
#include "epiquad/weighted.hpp"
