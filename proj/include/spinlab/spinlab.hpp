#pragma once

#include "spinlab/analysis.hpp"
#include "spinlab/classical.hpp"
#include "spinlab/eigensolve.hpp"
#include "spinlab/entangle.hpp"
#include "spinlab/lmg.hpp"
#include "spinlab/parallel.hpp"
#include "spinlab/symspace.hpp"
#include "spinlab/version.hpp"
