#pragma once

// Umbrella header for the whole library.

#include "absint/abstract_memory.hpp"
#include "absint/analyzer.hpp"
#include "absint/concrete_semantics.hpp"
#include "absint/difftest.hpp"
#include "absint/domain_core.hpp"
#include "absint/imp_ast.hpp"
#include "absint/imp_gen.hpp"
#include "absint/imp_parse.hpp"
#include "absint/interval_domain.hpp"
#include "absint/machine_int.hpp"
