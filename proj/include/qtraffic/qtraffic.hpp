#pragma once

#include "qtraffic/benchgen.hpp"
#include "qtraffic/circuit.hpp"
#include "qtraffic/config.hpp"
#include "qtraffic/error.hpp"
#include "qtraffic/mapper.hpp"
#include "qtraffic/metrics.hpp"
#include "qtraffic/qasm.hpp"
#include "qtraffic/random_graph.hpp"
#include "qtraffic/svg.hpp"
#include "qtraffic/sweep.hpp"
#include "qtraffic/trace_io.hpp"
