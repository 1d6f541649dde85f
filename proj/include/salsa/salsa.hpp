#pragma once

#include "salsa/augment.hpp"
#include "salsa/baseline.hpp"
#include "salsa/metrics.hpp"
#include "salsa/normalize.hpp"
#include "salsa/spatial.hpp"
#include "salsa/stft.hpp"
#include "salsa/synth.hpp"
#include "salsa/transforms.hpp"
