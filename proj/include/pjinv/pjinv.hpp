#pragma once

#include "pjinv/compact.hpp"
#include "pjinv/dini.hpp"
#include "pjinv/error.hpp"
#include "pjinv/inversion.hpp"
#include "pjinv/linalg.hpp"
#include "pjinv/mapdsl.hpp"
#include "pjinv/matrixset.hpp"
#include "pjinv/pseudojac.hpp"
#include "pjinv/random.hpp"
#include "pjinv/registry.hpp"
#include "pjinv/regularity.hpp"
