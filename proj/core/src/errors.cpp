#include "gvpj/errors.hpp"

namespace gvpj {

void require(bool condition, const std::string& what) {
  if (!condition) throw DomainError(what);
}

}  // namespace gvpj
