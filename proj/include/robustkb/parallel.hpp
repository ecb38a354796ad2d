#pragma once

namespace robustkb {

/// Worker count for parallel loops: ROBUSTKB_THREADS if set to a positive
/// integer, otherwise all hardware threads. Results never depend on it.
int worker_count();

}  // namespace robustkb
