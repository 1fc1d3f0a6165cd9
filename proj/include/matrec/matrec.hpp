#pragma once

// Umbrella header: exact S-nacci combinatorics, multiplicity counts, matrix
// norms, stability certificates, and the simulation cross-check.

#include "errors.hpp"     // IWYU pragma: export
#include "index_set.hpp"  // IWYU pragma: export
#include "matrix.hpp"     // IWYU pragma: export
#include "multiplicity.hpp" // IWYU pragma: export
#include "simulate.hpp"   // IWYU pragma: export
#include "snacci.hpp"     // IWYU pragma: export
#include "stability.hpp"  // IWYU pragma: export
