#include <math.h>
#include <stdio.h>
#include <string.h>
#include "sharpgrad.h"

static int check(int ok, const char *what) {
    if (!ok) fprintf(stderr, "FAILED: %s\n", what);
    return ok ? 0 : 1;
}

int main(void) {
    int bad = 0;
    SgContext *ctx = sg_context_new();
    SgConstant c;

    bad += check(sg_constant_optimal(ctx, 3, INFINITY, 0.5, &c) == SG_STATUS_OK, "constant status");
    bad += check(fabs(c.value - 8.0 / 3.0) < 1e-12, "p = inf constant");
    bad += check(c.regime == SG_REGIME_INFINITY, "regime");

    double x[3] = {0.0, 0.0, 0.0}, zeta[3] = {1.0, 0.0, 0.0}, p;
    bad += check(sg_poisson_kernel(ctx, 3, x, zeta, &p) == SG_STATUS_OK && fabs(p - 1.0) < 1e-15, "kernel at origin");

    bad += check(sg_constant_optimal(ctx, 3, 0.5, 0.5, &c) == SG_STATUS_INVALID_ARGUMENT, "p < 1 rejected");
    bad += check(strlen(sg_context_last_error(ctx)) > 0, "error message");
    bad += check(sg_constant_optimal(NULL, 3, 2.0, 0.5, &c) == SG_STATUS_NULL_POINTER, "null context");

    sg_context_free(ctx);
    if (bad == 0) printf("ok %s\n", sg_version());
    return bad;
}
