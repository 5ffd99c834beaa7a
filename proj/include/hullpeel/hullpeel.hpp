#pragma once

#include "hullpeel/analysis.hpp"
#include "hullpeel/error.hpp"
#include "hullpeel/geom.hpp"
#include "hullpeel/io.hpp"
#include "hullpeel/parallel.hpp"
#include "hullpeel/peel.hpp"
#include "hullpeel/ppp.hpp"
#include "hullpeel/rng.hpp"
#include "hullpeel/spectral.hpp"
#include "hullpeel/stats.hpp"
