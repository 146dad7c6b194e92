#include "arc/arc_register.hpp"

namespace arc {

template class BasicArcRegister<WriteProtocol::kCopyThenPublish>;
template class BasicArcRegister<WriteProtocol::kPublishThenCopy>;

}  // namespace arc
