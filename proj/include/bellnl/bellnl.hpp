#pragma once

#include "bellnl/errors.hpp"
#include "bellnl/functional.hpp"
#include "bellnl/functionals.hpp"
#include "bellnl/lhv.hpp"
#include "bellnl/linalg.hpp"
#include "bellnl/measurement.hpp"
#include "bellnl/report.hpp"
#include "bellnl/search.hpp"
#include "bellnl/spin.hpp"
#include "bellnl/states.hpp"
#include "bellnl/version.hpp"
