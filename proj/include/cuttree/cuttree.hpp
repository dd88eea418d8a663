#pragma once

#include "cuttree/cut_tree.hpp"
#include "cuttree/destruction.hpp"
#include "cuttree/experiment.hpp"
#include "cuttree/family.hpp"
#include "cuttree/format.hpp"
#include "cuttree/generators.hpp"
#include "cuttree/limit_laws.hpp"
#include "cuttree/limit_model.hpp"
#include "cuttree/parallel.hpp"
#include "cuttree/profile_gf.hpp"
#include "cuttree/rng.hpp"
#include "cuttree/rooted_tree.hpp"
#include "cuttree/schedule.hpp"
#include "cuttree/stats.hpp"
