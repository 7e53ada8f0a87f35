#pragma once

#include "ratio_convexity/characterize.hpp"
#include "ratio_convexity/csv.hpp"
#include "ratio_convexity/density.hpp"
#include "ratio_convexity/errors.hpp"
#include "ratio_convexity/kde.hpp"
#include "ratio_convexity/linalg.hpp"
#include "ratio_convexity/normtest.hpp"
#include "ratio_convexity/probe.hpp"
#include "ratio_convexity/random.hpp"
#include "ratio_convexity/ratio.hpp"
#include "ratio_convexity/spectral.hpp"
#include "ratio_convexity/version.hpp"
