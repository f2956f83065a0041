#pragma once

#include "common.hpp"
#include "dense.hpp"
#include "finite_volume.hpp"
#include "graph_core.hpp"
#include "ids.hpp"
#include "lattice_green.hpp"
#include "model.hpp"
#include "perron.hpp"
#include "report.hpp"
#include "secular.hpp"
#include "spectral_ops.hpp"
#include "thermo.hpp"
#include "torus.hpp"
