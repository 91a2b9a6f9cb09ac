#pragma once

#include "unimap/core.hpp"
#include "unimap/control.hpp"
#include "unimap/parallel.hpp"
#include "unimap/search.hpp"
#include "unimap/eigen_synthesis.hpp"
#include "unimap/subspace.hpp"
#include "unimap/cesium.hpp"
#include "unimap/qudit_gates.hpp"
#include "unimap/error_correction.hpp"
#include "unimap/wigner.hpp"
#include "unimap/io.hpp"
