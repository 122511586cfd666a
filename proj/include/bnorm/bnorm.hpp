#pragma once

#include "bnorm/appendix.hpp"
#include "bnorm/ballgeom.hpp"
#include "bnorm/bergman.hpp"
#include "bnorm/complex.hpp"
#include "bnorm/errors.hpp"
#include "bnorm/integrate.hpp"
#include "bnorm/norms.hpp"
#include "bnorm/rng.hpp"
#include "bnorm/specfun.hpp"
#include "bnorm/verify.hpp"
