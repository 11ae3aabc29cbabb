#ifndef DEADLEAVES_DEADLEAVES_HPP
#define DEADLEAVES_DEADLEAVES_HPP

#include "deadleaves/generator.hpp"
#include "deadleaves/geometry.hpp"
#include "deadleaves/json_io.hpp"
#include "deadleaves/likelihood.hpp"
#include "deadleaves/observer.hpp"
#include "deadleaves/oracle.hpp"
#include "deadleaves/partitions.hpp"
#include "deadleaves/prior.hpp"
#include "deadleaves/rng.hpp"
#include "deadleaves/specfun.hpp"

#endif  // DEADLEAVES_DEADLEAVES_HPP
