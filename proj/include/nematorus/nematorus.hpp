#ifndef NEMATORUS_NEMATORUS_HPP
#define NEMATORUS_NEMATORUS_HPP

#include "discrete_energy.hpp"
#include "energy.hpp"
#include "equilibria.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "operators.hpp"
#include "relaxation.hpp"
#include "summation.hpp"

#endif
