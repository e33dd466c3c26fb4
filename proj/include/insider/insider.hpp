#pragma once

// Umbrella header for the insider library.

#include "insider/analysis.hpp"
#include "insider/binding.hpp"
#include "insider/consistency.hpp"
#include "insider/error.hpp"
#include "insider/expression.hpp"
#include "insider/io.hpp"
#include "insider/model_json.hpp"
#include "insider/names.hpp"
#include "insider/propagation_graph.hpp"
#include "insider/repository.hpp"
#include "insider/safety_model.hpp"
#include "insider/synchronizer.hpp"
#include "insider/system_model.hpp"
