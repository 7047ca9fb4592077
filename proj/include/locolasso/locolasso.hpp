#pragma once

#include "locolasso/clustering.hpp"
#include "locolasso/core.hpp"
#include "locolasso/error.hpp"
#include "locolasso/experiments.hpp"
#include "locolasso/io.hpp"
#include "locolasso/knn.hpp"
#include "locolasso/model_file.hpp"
#include "locolasso/predictor.hpp"
#include "locolasso/regularizers.hpp"
#include "locolasso/solver.hpp"
