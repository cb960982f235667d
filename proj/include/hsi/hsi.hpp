#pragma once

#include "hsi/baselines.hpp"
#include "hsi/dct.hpp"
#include "hsi/dictionary.hpp"
#include "hsi/error.hpp"
#include "hsi/experiment.hpp"
#include "hsi/io.hpp"
#include "hsi/lanczos.hpp"
#include "hsi/layout.hpp"
#include "hsi/metrics.hpp"
#include "hsi/piht.hpp"
#include "hsi/png.hpp"
#include "hsi/rng.hpp"
#include "hsi/sensing.hpp"
#include "hsi/simulator.hpp"
#include "hsi/volume.hpp"
#include "hsi/wavelet.hpp"
