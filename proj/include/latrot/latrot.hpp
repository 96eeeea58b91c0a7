#pragma once

// Umbrella header: single-qubit-rotation schemes for optical-lattice qubits
// under multi-qubit addressing, by classical interference of N+1 tilted beams
// or by ordered sequences of 2^L pulses, plus the 2D hide/rotate/unhide
// protocol and the beam-imperfection error model.

#include "latrot/beams.hpp"
#include "latrot/core.hpp"
#include "latrot/error_model.hpp"
#include "latrot/interference.hpp"
#include "latrot/protocol_2d.hpp"
#include "latrot/sequence.hpp"
