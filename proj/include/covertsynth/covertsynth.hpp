#pragma once

#include "covertsynth/attack.hpp"
#include "covertsynth/automaton.hpp"
#include "covertsynth/bipartite.hpp"
#include "covertsynth/constraints.hpp"
#include "covertsynth/errors.hpp"
#include "covertsynth/game.hpp"
#include "covertsynth/json_io.hpp"
#include "covertsynth/names.hpp"
#include "covertsynth/synthesize.hpp"
#include "covertsynth/verify.hpp"
