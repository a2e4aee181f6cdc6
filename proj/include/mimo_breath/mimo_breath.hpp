#pragma once

#include "breathing.hpp"
#include "combining.hpp"
#include "config.hpp"
#include "csi_tensor.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "run_config.hpp"
#include "projection.hpp"
#include "scene.hpp"
#include "simulator.hpp"
#include "subcarrier.hpp"
