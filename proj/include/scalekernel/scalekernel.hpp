#pragma once

#include "scalekernel/diffusion.hpp"
#include "scalekernel/eigen.hpp"
#include "scalekernel/errors.hpp"
#include "scalekernel/mc.hpp"
#include "scalekernel/ode.hpp"
#include "scalekernel/quadrature.hpp"
#include "scalekernel/rng.hpp"
#include "scalekernel/scale.hpp"
#include "scalekernel/specialfn.hpp"
#include "scalekernel/valuation.hpp"
#include "scalekernel/version.hpp"
