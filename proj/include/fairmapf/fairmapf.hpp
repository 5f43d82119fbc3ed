#ifndef FAIRMAPF_FAIRMAPF_HPP
#define FAIRMAPF_FAIRMAPF_HPP

// Umbrella header for the solver library (no third-party dependencies).

#include "fairmapf/bench.hpp"
#include "fairmapf/cbs.hpp"
#include "fairmapf/core.hpp"
#include "fairmapf/fairness.hpp"
#include "fairmapf/icts.hpp"
#include "fairmapf/map_io.hpp"
#include "fairmapf/mechanism.hpp"
#include "fairmapf/oracle.hpp"
#include "fairmapf/rng.hpp"
#include "fairmapf/sassp.hpp"
#include "fairmapf/solve.hpp"

#endif  // FAIRMAPF_FAIRMAPF_HPP
