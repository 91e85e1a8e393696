#pragma once

#include "lagspec/errmodel.hpp"
#include "lagspec/errors.hpp"
#include "lagspec/gamma_ratio.hpp"
#include "lagspec/hp_scalar.hpp"
#include "lagspec/oracle.hpp"
#include "lagspec/oracle_cache.hpp"
#include "lagspec/quadrature.hpp"
#include "lagspec/recurrence.hpp"
#include "lagspec/spectral.hpp"
#include "lagspec/spectral_cases.hpp"
#include "lagspec/tridiagonal.hpp"
