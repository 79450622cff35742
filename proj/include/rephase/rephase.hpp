#pragma once

#include "rephase/builtins.hpp"
#include "rephase/config.hpp"
#include "rephase/emitter.hpp"
#include "rephase/engine.hpp"
#include "rephase/fidelity.hpp"
#include "rephase/monte_carlo.hpp"
#include "rephase/parser.hpp"
#include "rephase/phase.hpp"
#include "rephase/quadrature.hpp"
#include "rephase/random.hpp"
#include "rephase/rational.hpp"
#include "rephase/sequence.hpp"
#include "rephase/state.hpp"
#include "rephase/symbols.hpp"
#include "rephase/tradeoff.hpp"
