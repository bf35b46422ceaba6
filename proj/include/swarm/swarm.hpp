#pragma once

#include "swarm/assignment.hpp"
#include "swarm/energy.hpp"
#include "swarm/outputs.hpp"
#include "swarm/poly.hpp"
#include "swarm/protocol.hpp"
#include "swarm/scenario_io.hpp"
#include "swarm/sim.hpp"
#include "swarm/trajectory.hpp"
#include "swarm/vec2.hpp"
#include "swarm/world.hpp"
