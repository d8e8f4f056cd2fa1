#pragma once

#include "automaton.hpp"
#include "cache.hpp"
#include "counting.hpp"
#include "errors.hpp"
#include "genfunc.hpp"
#include "numeric.hpp"
#include "occurrence.hpp"
#include "permutations.hpp"
#include "polynomial.hpp"
#include "randomwords.hpp"
#include "rng.hpp"
#include "verify.hpp"
#include "weakavoid.hpp"
#include "word.hpp"
