#pragma once

#include <string_view>

#include "pvrag/core/descriptor.hpp"
#include "pvrag/core/errors.hpp"

namespace pvrag::assessor {

/// No structured object with the four descriptor fields could be found.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Extracts the first JSON object carrying presence/quantity/location/explanation
/// from free-form model output (prose and code fences around it are ignored).
/// Keys and vocabulary are matched case-insensitively against the canonical
/// forms; anything else is rejected.
///
/// Throws ParseError, VocabularyError or ConsistencyError.
PVDescriptor parse_structured_output(std::string_view raw);

}  // namespace pvrag::assessor
