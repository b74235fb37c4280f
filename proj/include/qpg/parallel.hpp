#pragma once

namespace qpg {

// Execution mode for the data-parallel kernels. Every kernel has a serial
// path whose results are bit-identical to the OpenMP path: work items are
// independent, land in preassigned slots, and reductions run serially in
// index order.
enum class Exec { serial, parallel };

int hardware_threads();

}  // namespace qpg
