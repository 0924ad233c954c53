#pragma once

// Umbrella header for the multitemporal InSAR time-series toolkit.

#include "mtinsar/calibration.hpp"
#include "mtinsar/catalog.hpp"
#include "mtinsar/coherence.hpp"
#include "mtinsar/corrections.hpp"
#include "mtinsar/dates.hpp"
#include "mtinsar/errors.hpp"
#include "mtinsar/geometry.hpp"
#include "mtinsar/inversion.hpp"
#include "mtinsar/multires.hpp"
#include "mtinsar/pairs.hpp"
#include "mtinsar/phase.hpp"
#include "mtinsar/pipeline.hpp"
#include "mtinsar/product.hpp"
#include "mtinsar/rng.hpp"
#include "mtinsar/simulate.hpp"
#include "mtinsar/stack.hpp"
#include "mtinsar/triangulation.hpp"
#include "mtinsar/unwrap.hpp"
