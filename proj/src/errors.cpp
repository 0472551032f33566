#include "specden/errors.hpp"

namespace specden {

Error::Error(std::string module, std::string operation, const std::string& message)
    : std::runtime_error(module + "::" + operation + ": " + message),
      module_(std::move(module)),
      operation_(std::move(operation)),
      detail_(message) {}

}  // namespace specden
