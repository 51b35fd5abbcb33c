#pragma once

// Umbrella include for the whole library.

#include "disk.hpp"
#include "disk_diagnostics.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "kahler.hpp"
#include "lattice.hpp"
#include "moduli.hpp"
#include "parallel.hpp"
#include "projective.hpp"
#include "surface.hpp"
