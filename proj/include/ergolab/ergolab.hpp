#pragma once

#include "ergolab/errors.hpp"
#include "ergolab/linalg.hpp"
#include "ergolab/lie.hpp"
#include "ergolab/boundary_point.hpp"
#include "ergolab/quadrature.hpp"
#include "ergolab/boundary.hpp"
#include "ergolab/reduce.hpp"
#include "ergolab/harmonic.hpp"
#include "ergolab/lattice.hpp"
#include "ergolab/averages.hpp"
#include "ergolab/report.hpp"
#include "ergolab/run.hpp"
