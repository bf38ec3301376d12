#pragma once

// Internal expression-parser entry point shared with the model-language and
// query parsers. Not installed.

#include "flexverif/expr.hpp"
#include "token_stream.hpp"

namespace flexverif::detail {

/// Parses one expression starting at the stream cursor; leaves trailing
/// tokens unconsumed.
ExprPtr parse_expr(TokenStream& ts);

}  // namespace flexverif::detail
