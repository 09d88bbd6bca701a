#pragma once

#include "skewpivot/config.hpp"
#include "skewpivot/datagen.hpp"
#include "skewpivot/descriptor.hpp"
#include "skewpivot/edgeworth.hpp"
#include "skewpivot/error.hpp"
#include "skewpivot/harness.hpp"
#include "skewpivot/intervals.hpp"
#include "skewpivot/multivariate.hpp"
#include "skewpivot/normal.hpp"
#include "skewpivot/pivots.hpp"
#include "skewpivot/presets.hpp"
#include "skewpivot/report.hpp"
#include "skewpivot/rng.hpp"
#include "skewpivot/tensor.hpp"
#include "skewpivot/weights.hpp"
#include "skewpivot/window_solver.hpp"
