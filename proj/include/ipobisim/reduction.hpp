#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "ipobisim/terms.hpp"

namespace ipobisim {

enum class Calculus { Lambda, CL, CLStar };
enum class Strategy { Lazy, Cbv, NormalFull };

std::string to_string(Calculus c);
std::string to_string(Strategy s);
Calculus parse_calculus(std::string_view s);  // throws std::invalid_argument
Strategy parse_strategy(std::string_view s);

inline constexpr std::size_t kDefaultFuel = 512;

enum class StepKind { Stepped, Halted, StuckOpen };

template <class T>
struct StepResult {
  StepKind kind = StepKind::Halted;
  T next{};         // successor when Stepped, otherwise the input
  SpineClass cls{};  // class of the input when not Stepped
  std::string var;   // blocking variable when StuckOpen
};

enum class NormalStatus { Normal, FuelExhausted };

template <class T>
struct NormalizeOutcome {
  T result{};
  NormalStatus status = NormalStatus::Normal;
  std::size_t steps = 0;
};

// One step of the strategy on combinatory terms. `calculus` must be CL or CLStar.
// Plain CL rejects K'/S'/S'' constructors with std::invalid_argument.
StepResult<CLTerm> step(const CLTerm& t, Calculus calculus, Strategy strategy);

// One step on lambda terms. Lazy and Cbv require closed input (OpenTermError);
// NormalFull reduces under binders and accepts open terms.
StepResult<LambdaTerm> step(const LambdaTerm& t, Strategy strategy);

NormalizeOutcome<CLTerm> normalize_tau(const CLTerm& t, Calculus calculus, Strategy strategy,
                                       std::size_t fuel = kDefaultFuel);
NormalizeOutcome<LambdaTerm> normalize_tau(const LambdaTerm& t, Strategy strategy,
                                           std::size_t fuel = kDefaultFuel);

// Value predicate of the strategy: lazy CL values are unsaturated K/S spines,
// lazy CL* values are the K/S/K'/S'/S'' forms, cbv follows the by-value grammars.
bool is_value(const CLTerm& t, Calculus calculus, Strategy strategy);
bool is_value(const LambdaTerm& t);

// Contracts (\x.M) N.
LambdaTerm beta(const LambdaTerm& abstraction, const LambdaTerm& argument);
LambdaTerm shift(const LambdaTerm& t, int by, int cutoff = 0);

// Minimum number of extra arguments after which the head of a plain CL value fires.
std::size_t missing_args(const CLTerm& plain_value);

}  // namespace ipobisim
