#pragma once

// Umbrella header for the frequency-domain modeling and inversion toolkit.

#include "cbswri/acquisition.hpp"
#include "cbswri/born_series.hpp"
#include "cbswri/config.hpp"
#include "cbswri/continuation.hpp"
#include "cbswri/dense_reference.hpp"
#include "cbswri/fft.hpp"
#include "cbswri/grid.hpp"
#include "cbswri/io.hpp"
#include "cbswri/model.hpp"
#include "cbswri/parallel.hpp"
#include "cbswri/sketch.hpp"
#include "cbswri/wavefield.hpp"
#include "cbswri/wri.hpp"
