#pragma once

#include <psox/analysis.hpp>
#include <psox/benchmarks.hpp>
#include <psox/config.hpp>
#include <psox/core.hpp>
#include <psox/engine.hpp>
#include <psox/experiment.hpp>
#include <psox/operators.hpp>
#include <psox/plot.hpp>
#include <psox/stats.hpp>
#include <psox/sweep.hpp>
