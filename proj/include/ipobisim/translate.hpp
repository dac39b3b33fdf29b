#pragma once

#include <cstddef>

#include "ipobisim/terms.hpp"

namespace ipobisim {

// Lambda to combinators. Free variables become metavariables of the same name;
// the result never contains K'/S'/S''.
CLTerm to_cl(const LambdaTerm& m);

// Combinators to lambda. K'/S'/S'' are read as the partial applications they abbreviate;
// metavariables become free variables.
LambdaTerm to_lambda(const CLTerm& t);

enum class ETStatus { Confirmed, FuelExhausted, Mismatch };

struct ETCheck {
  ETStatus status = ETStatus::Confirmed;
  LambdaTerm original_normal;
  LambdaTerm roundtrip_normal;
};

// Normalizes to_lambda(to_cl(m)) and m with the full normal-order stepper and compares.
ETCheck check_ET_identity(const LambdaTerm& m, std::size_t fuel);

std::string to_string(ETStatus s);

}  // namespace ipobisim
