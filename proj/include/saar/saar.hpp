#pragma once

#include "saar/attacks.hpp"
#include "saar/common.hpp"
#include "saar/gain_synthesis.hpp"
#include "saar/linalg.hpp"
#include "saar/metrics.hpp"
#include "saar/observer.hpp"
#include "saar/qp.hpp"
#include "saar/resilient_controller.hpp"
#include "saar/safety_filter.hpp"
#include "saar/scenario.hpp"
#include "saar/scenario_io.hpp"
#include "saar/simulator.hpp"
#include "saar/topology.hpp"
#include "saar/trace_io.hpp"
