#pragma once

#include "leontief/errors.hpp"
#include "leontief/linalg.hpp"
#include "leontief/economy.hpp"
#include "leontief/graph.hpp"
#include "leontief/spectral.hpp"
#include "leontief/blockwise.hpp"
#include "leontief/classification.hpp"
#include "leontief/solver.hpp"
#include "leontief/sensitivity.hpp"
#include "leontief/io.hpp"
