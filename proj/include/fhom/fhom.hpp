#ifndef FHOM_FHOM_HPP
#define FHOM_FHOM_HPP

#include "fhom/config.hpp"
#include "fhom/converter.hpp"
#include "fhom/csv.hpp"
#include "fhom/errors.hpp"
#include "fhom/estimator.hpp"
#include "fhom/fock_oracle.hpp"
#include "fhom/forward.hpp"
#include "fhom/hom.hpp"
#include "fhom/spectra.hpp"
#include "fhom/verification.hpp"

#endif
