#include <stdio.h>
#include <string.h>

#include "cuspforge.h"

int main(void) {
    CfConfiguration *h = NULL;
    if (cf_configuration_catalog("holzapfel", &h) != CF_STATUS_OK) return 10;

    CfSingularSummary s;
    if (cf_singular_locus(h, &s) != CF_STATUS_OK) return 11;
    if (s.components != 6 || s.singular_points != 3 || !s.proportional) return 12;

    CfConfiguration *p = NULL;
    if (cf_pullback(h, "1+1w", "1", 1, 1, &p) != CF_STATUS_OK) return 13;
    if (cf_singular_locus(p, &s) != CF_STATUS_OK) return 14;
    if (s.singular_points != 6) return 15;

    char *json = NULL;
    if (cf_configuration_to_json(p, &json) != CF_STATUS_OK) return 16;
    if (strstr(json, "\"curves\"") == NULL) return 17;
    cf_string_free(json);

    if (cf_configuration_catalog("missing", &p) != CF_STATUS_INVALID_INPUT) return 18;
    if (cf_last_error_message() == NULL) return 19;

    cf_configuration_free(p);
    cf_configuration_free(h);
    puts("ok");
    return 0;
}
