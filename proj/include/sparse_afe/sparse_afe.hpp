#ifndef SPARSE_AFE_SPARSE_AFE_HPP
#define SPARSE_AFE_SPARSE_AFE_HPP

// Umbrella header.

#include "adaptive_filters.hpp"
#include "config_io.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "metrics.hpp"
#include "random.hpp"
#include "report.hpp"
#include "signal_model.hpp"

#endif // SPARSE_AFE_SPARSE_AFE_HPP
