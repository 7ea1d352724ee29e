#ifndef PCT_COMMON_CHECK_H_
#define PCT_COMMON_CHECK_H_

#include <cstdio>
#include <cstdlib>

// Contract violations abort the process; recoverable errors use absl::Status.
#define PCT_CHECK(cond, msg)                                              \
  do {                                                                    \
    if (!(cond)) {                                                        \
      std::fprintf(stderr, "%s:%d: check failed: %s (%s)\n", __FILE__,    \
                   __LINE__, #cond, msg);                                 \
      std::abort();                                                       \
    }                                                                     \
  } while (false)

#endif  // PCT_COMMON_CHECK_H_
