#pragma once

#include "wadg/analysis.hpp"
#include "wadg/config.hpp"
#include "wadg/errors.hpp"
#include "wadg/geometry.hpp"
#include "wadg/lsrk.hpp"
#include "wadg/mesh.hpp"
#include "wadg/mesh_io.hpp"
#include "wadg/meshgen.hpp"
#include "wadg/nodes.hpp"
#include "wadg/operators.hpp"
#include "wadg/polynomials.hpp"
#include "wadg/quadrature.hpp"
#include "wadg/reference_element.hpp"
#include "wadg/solver.hpp"
#include "wadg/special.hpp"
