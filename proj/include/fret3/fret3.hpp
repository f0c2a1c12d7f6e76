#pragma once

#include "angular.hpp"
#include "atomic_data.hpp"
#include "collective.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "dipole.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "gate.hpp"
#include "interaction.hpp"
#include "nelder_mead.hpp"
#include "parallel.hpp"
#include "quantum_numbers.hpp"
#include "radial.hpp"
#include "scan.hpp"
#include "system.hpp"
#include "units.hpp"
