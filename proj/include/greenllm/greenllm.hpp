#pragma once

#include "carbon.hpp"
#include "compression.hpp"
#include "config.hpp"
#include "energy_model.hpp"
#include "error.hpp"
#include "optimizer.hpp"
#include "provider_registry.hpp"
#include "report.hpp"
#include "scoring.hpp"
#include "trial_store.hpp"
