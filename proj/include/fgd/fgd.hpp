#pragma once

#include "fgd/checks.hpp"
#include "fgd/error.hpp"
#include "fgd/special.hpp"
#include "fgd/functions.hpp"
#include "fgd/fraccalc.hpp"
#include "fgd/optim.hpp"
#include "fgd/lms.hpp"
#include "fgd/io.hpp"
#include "fgd/experiments.hpp"
