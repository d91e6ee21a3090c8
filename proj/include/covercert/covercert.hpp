#pragma once

#include "covercert/certify.hpp"
#include "covercert/coverings.hpp"
#include "covercert/errors.hpp"
#include "covercert/factorbase.hpp"
#include "covercert/lucas.hpp"
#include "covercert/modmath.hpp"
#include "covercert/polyfield.hpp"
#include "covercert/tablefile.hpp"
#include "covercert/tables.hpp"
#include "covercert/witness.hpp"
