#pragma once

// tfkit: a text-format specification engine. Datatype definitions written
// in YAML compile to anchored patterns plus parse plans; the codec then
// converts between text representations and structured values in both
// directions.

#include "codec.hpp"     // IWYU pragma: export
#include "compiler.hpp"  // IWYU pragma: export
#include "definition.hpp"// IWYU pragma: export
#include "errors.hpp"    // IWYU pragma: export
#include "loader.hpp"    // IWYU pragma: export
#include "pattern.hpp"   // IWYU pragma: export
#include "value.hpp"     // IWYU pragma: export
#include "yaml.hpp"      // IWYU pragma: export
