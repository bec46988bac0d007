#pragma once

#include "riskscope/error.hpp"
#include "riskscope/dist_core.hpp"
#include "riskscope/sampling.hpp"
#include "riskscope/measures.hpp"
#include "riskscope/coherence.hpp"
#include "riskscope/ambiguity.hpp"
#include "riskscope/json_io.hpp"
#include "riskscope/plot.hpp"
#include "riskscope/scenarios.hpp"
