/* Copyright 2026 The sdese Authors
 * License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
 */

/* Compiled as C: the public header must be valid C. */

#include <math.h>
#include <stdio.h>

#include "sdese/sdese.h"

int main(void) {
  sdese_sde* sde = NULL;
  double v = 0.0;
  double a = 0.0;
  double b = 0.0;
  if (sdese_sde_create_default(SDESE_SDE_OUVE, &sde) != SDESE_OK) return 1;
  if (sdese_sde_mean_coefficients(sde, 1.0, &a, &b) != SDESE_OK) return 2;
  if (fabs(a - exp(-1.5)) > 1e-15 || fabs(a + b - 1.0) > 1e-15) return 3;
  if (sdese_sde_variance(sde, -1.0, &v) != SDESE_ERR_DOMAIN) return 4;
  if (sdese_last_error()[0] == '\0') return 5;
  sdese_sde_destroy(sde);
  printf("c smoke ok (%s)\n", sdese_version());
  return 0;
}
