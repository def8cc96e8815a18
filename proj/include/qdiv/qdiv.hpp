#pragma once

#include "qdiv/gf2.hpp"
#include "qdiv/quant.hpp"
#include "qdiv/codes.hpp"
#include "qdiv/bp.hpp"
#include "qdiv/osd.hpp"
#include "qdiv/diversity.hpp"
#include "qdiv/decoders.hpp"
#include "qdiv/noise.hpp"
#include "qdiv/problem.hpp"
#include "qdiv/dem.hpp"
#include "qdiv/harness.hpp"
#include "qdiv/fixtures.hpp"
#include "qdiv/config.hpp"
