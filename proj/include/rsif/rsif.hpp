#pragma once

#include "rsif/config.hpp"
#include "rsif/data_model.hpp"
#include "rsif/dataset_io.hpp"
#include "rsif/distances.hpp"
#include "rsif/eval.hpp"
#include "rsif/forest.hpp"
#include "rsif/model_io.hpp"
#include "rsif/projection.hpp"
#include "rsif/synth.hpp"
#include "rsif/tree.hpp"
