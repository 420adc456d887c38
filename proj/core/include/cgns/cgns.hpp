#pragma once

#include "cgns/diagnostics.hpp"
#include "cgns/errors.hpp"
#include "cgns/filter.hpp"
#include "cgns/io.hpp"
#include "cgns/linalg.hpp"
#include "cgns/linear_model.hpp"
#include "cgns/model.hpp"
#include "cgns/parallel.hpp"
#include "cgns/rng.hpp"
#include "cgns/sampler.hpp"
#include "cgns/simulate.hpp"
#include "cgns/smoother.hpp"
#include "cgns/triad.hpp"
#include "cgns/version.hpp"
