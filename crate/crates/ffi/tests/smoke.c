#include <stdio.h>
#include <string.h>
#include "descents.h"

int main(void) {
    DescentsPmf *pmf = NULL;
    if (descents_pmf_new(DESCENTS_MEASURE_R, DESCENTS_STATISTIC_D, 2, 2, &pmf) != DESCENTS_STATUS_OK) return 1;
    char *mass = NULL;
    if (descents_pmf_mass(pmf, 0, &mass) != DESCENTS_STATUS_OK) return 2;
    int bad = strcmp(mass, "3/4") != 0;
    descents_string_free(mass);
    descents_pmf_free(pmf);
    if (bad) return 3;

    if (descents_pmf_new(DESCENTS_MEASURE_C, DESCENTS_STATISTIC_C, 2, 1, &pmf) != DESCENTS_STATUS_INVALID_ARGUMENT) return 4;
    if (descents_last_error() == NULL) return 5;

    DescentsTvReport tv;
    if (descents_tv(DESCENTS_TV_STATISTIC_K_MINUS1_MINUS_D_UNDER_R, 1, 9, &tv) != DESCENTS_STATUS_OK) return 6;
    if (!(tv.tv_exact < tv.bound)) return 7;
    printf("ok %s\n", descents_version());
    return 0;
}
