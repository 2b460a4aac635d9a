#pragma once

// Upper bounds on the oblivious-transfer capacity of discrete memoryless
// channels, built from an auxiliary-variable functional over the probability
// simplex, plus executable checks of the inequalities behind it.

#include "otcap/bounds.hpp"
#include "otcap/channel.hpp"
#include "otcap/coupling.hpp"
#include "otcap/errors.hpp"
#include "otcap/parallel.hpp"
#include "otcap/prob.hpp"
#include "otcap/rng.hpp"
#include "otcap/svg.hpp"
#include "otcap/tension.hpp"
#include "otcap/verify.hpp"
