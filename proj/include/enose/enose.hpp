#ifndef ENOSE_ENOSE_HPP
#define ENOSE_ENOSE_HPP

#include "blocks.hpp"
#include "config_io.hpp"
#include "decoder.hpp"
#include "events.hpp"
#include "frontend.hpp"
#include "harness.hpp"
#include "rng.hpp"
#include "signal_model.hpp"
#include "types.hpp"

#endif
