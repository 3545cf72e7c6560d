#pragma once

#include "ponp/error.hpp"
#include "ponp/series.hpp"
#include "ponp/geometry.hpp"
#include "ponp/hierarchy.hpp"
#include "ponp/laplace.hpp"
#include "ponp/expansion.hpp"
#include "ponp/quadrature.hpp"
#include "ponp/oracle.hpp"
#include "ponp/distributional.hpp"
#include "ponp/kernels.hpp"
