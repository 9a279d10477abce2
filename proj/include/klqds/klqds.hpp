#pragma once

#include "klqds/error.hpp"
#include "klqds/state_set.hpp"
#include "klqds/alphabet.hpp"
#include "klqds/nfa.hpp"
#include "klqds/dfa.hpp"
#include "klqds/kl.hpp"
#include "klqds/qds.hpp"
#include "klqds/qds_build.hpp"
#include "klqds/path_dfa.hpp"
#include "klqds/reduce.hpp"
#include "klqds/family.hpp"
#include "klqds/io.hpp"
#include "klqds/dot.hpp"
