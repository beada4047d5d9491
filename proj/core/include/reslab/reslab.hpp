#pragma once

#include "reslab/dynamics.hpp"
#include "reslab/errors.hpp"
#include "reslab/model.hpp"
#include "reslab/quadrature.hpp"
#include "reslab/spectra.hpp"
#include "reslab/specfun.hpp"
