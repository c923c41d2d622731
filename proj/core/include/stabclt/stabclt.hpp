#pragma once

#include "stabclt/errors.hpp"
#include "stabclt/experiments.hpp"
#include "stabclt/functionals.hpp"
#include "stabclt/neighbors.hpp"
#include "stabclt/point_process.hpp"
#include "stabclt/regions.hpp"
#include "stabclt/rng.hpp"
#include "stabclt/special_fn.hpp"
#include "stabclt/stabilization.hpp"
#include "stabclt/statistics.hpp"
