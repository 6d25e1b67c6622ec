#pragma once

#include "ridgesub/bench.hpp"
#include "ridgesub/dataset.hpp"
#include "ridgesub/leverage.hpp"
#include "ridgesub/parallel.hpp"
#include "ridgesub/ridge.hpp"
#include "ridgesub/rng.hpp"
#include "ridgesub/samplers.hpp"
#include "ridgesub/simgen.hpp"
#include "ridgesub/theory.hpp"
#include "ridgesub/tuning.hpp"
