// Umbrella header.
#pragma once

#include "tempagent/decide.hpp"
#include "tempagent/enumerate.hpp"
#include "tempagent/error.hpp"
#include "tempagent/formula.hpp"
#include "tempagent/frame.hpp"
#include "tempagent/model.hpp"
#include "tempagent/oracle.hpp"
#include "tempagent/parser.hpp"
#include "tempagent/relation.hpp"
#include "tempagent/rules.hpp"
#include "tempagent/semantics.hpp"
#include "tempagent/unroll.hpp"
