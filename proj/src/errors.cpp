#include "fracint/errors.hpp"

namespace fracint {

void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ParameterError(message);
    }
}

}  // namespace fracint
