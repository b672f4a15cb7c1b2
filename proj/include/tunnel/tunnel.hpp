#pragma once

// Umbrella header.

#include "tunnel/analysis.hpp"
#include "tunnel/engine.hpp"
#include "tunnel/geometry.hpp"
#include "tunnel/svg.hpp"
#include "tunnel/trace_io.hpp"
#include "tunnel/transforms.hpp"
