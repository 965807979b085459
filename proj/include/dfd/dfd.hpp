#pragma once

#include "cues.hpp"
#include "dark_channel.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "io.hpp"
#include "kde.hpp"
#include "losses.hpp"
#include "metrics.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "raster.hpp"
#include "synth.hpp"
