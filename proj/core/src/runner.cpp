#include "qfactor/error.hpp"
