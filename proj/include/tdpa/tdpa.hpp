#pragma once

// Umbrella header: the full tracking toolkit.

#include "tdpa/config.hpp"
#include "tdpa/dp.hpp"
#include "tdpa/engine.hpp"
#include "tdpa/errors.hpp"
#include "tdpa/geometry.hpp"
#include "tdpa/json_util.hpp"
#include "tdpa/metrics.hpp"
#include "tdpa/mining.hpp"
#include "tdpa/oracle.hpp"
#include "tdpa/pipeline.hpp"
#include "tdpa/presets.hpp"
#include "tdpa/random.hpp"
#include "tdpa/records.hpp"
#include "tdpa/short_term.hpp"
#include "tdpa/simulator.hpp"
#include "tdpa/stream_io.hpp"
#include "tdpa/tracklet.hpp"
