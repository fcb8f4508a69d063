#pragma once

#include "channel.hpp"
#include "detection.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "ghz_math.hpp"
#include "ghz_spec.hpp"
#include "information.hpp"
#include "oracles.hpp"
#include "protocol.hpp"
#include "protocol_types.hpp"
#include "quantum.hpp"
#include "rng.hpp"
#include "serialize.hpp"
#include "sweep.hpp"
