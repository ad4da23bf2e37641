/* Power and L1 sum loops for _kernels_l1.pyx.
 *
 * Compiled with -ffast-math so gcc maps exp/log onto the libmvec vector
 * variants; target_clones picks the widest variant the CPU supports at load
 * time. Every base passed in is a strictly positive finite number.
 */
#ifndef FRACLANGEVIN_VECPOW_H
#define FRACLANGEVIN_VECPOW_H

#include <math.h>
#include <stddef.h>

#if defined(__x86_64__) && defined(__GNUC__) && !defined(__clang__)
#define FL_CLONES __attribute__((target_clones("avx512f", "avx2", "default")))
#else
#define FL_CLONES
#endif

/* buf[j] = (tm - t[j])^p - (tm - t[j+1])^p for j < m, with tm = t[m].
 * Written as b^p expm1(p log1p(d/b)) so that nodes below eps*tm keep their
 * weight instead of cancelling. */
FL_CLONES static void fl_gaps(const double *t, double p, ptrdiff_t m, double *buf)
{
    const double tm = t[m];
    for (ptrdiff_t j = 0; j < m - 1; j++) {
        double b = tm - t[j + 1];
        double d = t[j + 1] - t[j];
        buf[j] = exp(p * log(b)) * expm1(p * log1p(d / b));
    }
    buf[m - 1] = exp(p * log(tm - t[m - 1]));
}

/* sum_{j < n} w[j] * slope[j] */
FL_CLONES static double fl_dot(const double *w, const double *slope, ptrdiff_t n)
{
    double acc = 0.0;
    for (ptrdiff_t j = 0; j < n; j++)
        acc += w[j] * slope[j];
    return acc;
}

/* sum_{j < n} w[n - j] * slope[j], the uniform-grid history */
FL_CLONES static double fl_lag_dot(const double *w, const double *slope, ptrdiff_t n)
{
    double acc = 0.0;
    for (ptrdiff_t j = 0; j < n; j++)
        acc += w[n - j] * slope[j];
    return acc;
}

#endif
