#include "jtess/common.hpp"
