#pragma once

#include <boost/multiprecision/float128.hpp>

namespace g2toda {

using f128 = boost::multiprecision::float128;

}  // namespace g2toda
