#pragma once

#include "aerostack/backtest.hpp"
#include "aerostack/commands.hpp"
#include "aerostack/config.hpp"
#include "aerostack/data_model.hpp"
#include "aerostack/ensemble.hpp"
#include "aerostack/error.hpp"
#include "aerostack/features.hpp"
#include "aerostack/importance.hpp"
#include "aerostack/learners.hpp"
#include "aerostack/loess.hpp"
#include "aerostack/metrics.hpp"
#include "aerostack/nnls.hpp"
#include "aerostack/parallel.hpp"
#include "aerostack/report.hpp"
#include "aerostack/synth.hpp"
#include "aerostack/thresholds.hpp"
#include "aerostack/time.hpp"
#include "aerostack/tree.hpp"
