/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/bench.hpp"
#include "qccd/circuit.hpp"
#include "qccd/device_graph.hpp"
#include "qccd/gate_dag.hpp"
#include "qccd/ion_state.hpp"
#include "qccd/orchestrator.hpp"
#include "qccd/partitioner.hpp"
#include "qccd/schedule.hpp"
#include "qccd/shuttling.hpp"
#include "qccd/types.hpp"
#include "qccd/verifier.hpp"
