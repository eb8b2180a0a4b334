#ifndef MYSTERY_MYSTERY_HPP
#define MYSTERY_MYSTERY_HPP

#include <mystery/elliptic.hpp>
#include <mystery/errors.hpp>
#include <mystery/nevanlinna.hpp>
#include <mystery/quadrature.hpp>
#include <mystery/series.hpp>
#include <mystery/theta.hpp>

#endif
