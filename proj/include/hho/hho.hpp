// Umbrella header.

#pragma once

#include "hho/acceptance.hpp"
#include "hho/analysis.hpp"
#include "hho/assembly.hpp"
#include "hho/cases.hpp"
#include "hho/flux.hpp"
#include "hho/harness.hpp"
#include "hho/local_ops.hpp"
#include "hho/mesh.hpp"
#include "hho/polyquad.hpp"
#include "hho/threading.hpp"
