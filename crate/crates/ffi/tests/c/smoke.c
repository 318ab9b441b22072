#include <math.h>
#include <stdio.h>
#include <string.h>
#include "variaccel.h"

int main(void) {
    VaContext *ctx = NULL;
    if (va_context_new(30, 10, &ctx) != VA_STATUS_OK) return 1;

    VaNumber *z = NULL;
    if (va_zeta_accel(ctx, "2", "0", "1", 60, &z) != VA_STATUS_OK) return 2;
    if (fabs(va_number_re(z) - 1.6449340668482264) > 1e-15) return 3;
    char *text = va_number_to_string(z, 25);
    printf("%s\n", text);
    va_string_free(text);
    va_number_free(z);

    VaNumber *p = NULL;
    if (va_pi_accel(ctx, "-0.7", 5, &p) != VA_STATUS_DOMAIN) return 4;
    if (strstr(va_last_error(), "lambda must exceed -1/2") == NULL) return 5;

    va_context_free(ctx);
    return 0;
}
