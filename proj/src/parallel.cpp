#include "hyplab/parallel.hpp"

namespace hyplab::par {

Exec& default_exec() {
#ifdef _OPENMP
    static Exec mode = Exec::openmp;
#else
    static Exec mode = Exec::serial;
#endif
    return mode;
}

} // namespace hyplab::par
