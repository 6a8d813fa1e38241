#pragma once

// Everything except the CLI command layer (symbound/cli.hpp).

#include "symbound/analyzer.hpp"
#include "symbound/catalog.hpp"
#include "symbound/config.hpp"
#include "symbound/error.hpp"
#include "symbound/errorprop.hpp"
#include "symbound/expr.hpp"
#include "symbound/mat2.hpp"
#include "symbound/orbit.hpp"
#include "symbound/parse.hpp"
#include "symbound/random.hpp"
#include "symbound/schemes.hpp"
#include "symbound/systems.hpp"
#include "symbound/verify.hpp"
