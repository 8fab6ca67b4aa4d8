#ifndef NMF_NMF_HPP
#define NMF_NMF_HPP

#include "nmf/additive.hpp"
#include "nmf/baselines.hpp"
#include "nmf/bench.hpp"
#include "nmf/config.hpp"
#include "nmf/element_update.hpp"
#include "nmf/kkt.hpp"
#include "nmf/matrix.hpp"
#include "nmf/matrix_io.hpp"
#include "nmf/solve.hpp"

#endif  // NMF_NMF_HPP
