#pragma once

#include "qhedge/black_scholes.hpp"
#include "qhedge/calibration.hpp"
#include "qhedge/distribution.hpp"
#include "qhedge/error.hpp"
#include "qhedge/hedge_engine.hpp"
#include "qhedge/market.hpp"
#include "qhedge/mc_oracle.hpp"
#include "qhedge/normal.hpp"
#include "qhedge/pricing.hpp"
#include "qhedge/reports.hpp"
