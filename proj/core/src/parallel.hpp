#pragma once

#if defined(XHODGE_HAVE_OPENMP)
#define XHODGE_PARALLEL_FOR _Pragma("omp parallel for schedule(static)")
#else
#define XHODGE_PARALLEL_FOR
#endif
