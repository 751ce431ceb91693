#pragma once

// Umbrella header.

#include "qaq/error.hpp"
#include "qaq/image.hpp"
#include "qaq/image_io.hpp"
#include "qaq/filters.hpp"
#include "qaq/local_stats.hpp"
#include "qaq/ssim.hpp"
#include "qaq/ggd.hpp"
#include "qaq/mscn.hpp"
#include "qaq/features.hpp"
#include "qaq/mvg.hpp"
#include "qaq/regularizers.hpp"
