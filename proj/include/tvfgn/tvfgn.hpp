#pragma once

#include "tvfgn/error.hpp"
#include "tvfgn/stats.hpp"
#include "tvfgn/parallel.hpp"
#include "tvfgn/optimize.hpp"
#include "tvfgn/fgn.hpp"
#include "tvfgn/ar1_cascade.hpp"
#include "tvfgn/mixture.hpp"
#include "tvfgn/priors.hpp"
#include "tvfgn/lgm.hpp"
#include "tvfgn/inference.hpp"
#include "tvfgn/baselines.hpp"
#include "tvfgn/series.hpp"
#include "tvfgn/config.hpp"
#include "tvfgn/evalharness.hpp"
#include "tvfgn/fit.hpp"
