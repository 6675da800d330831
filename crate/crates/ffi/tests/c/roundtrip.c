#include <stdio.h>
#include <string.h>
#include "hurwitz_tr.h"

int main(void) {
    HtCurve *c = NULL;
    HtRecursion *r = NULL;
    char *out = NULL;
    if (ht_curve_new("{\"G\":[\"1\",\"1\"],\"S\":[\"0\",\"0\",\"1/2\"],\"gamma\":\"1\"}", &c) != HT_STATUS_OK) return 1;
    if (ht_recursion_new(c, &r) != HT_STATUS_OK) return 2;
    if (ht_recursion_omega(r, 1, 1, &out) != HT_STATUS_OK) return 3;
    if (strstr(out, "\"numerator\":\"z1^3\"") == NULL) return 4;
    ht_string_free(out);
    if (ht_hurwitz("1", "2", "2", 0, false, &out) != HT_STATUS_OK) return 5;
    if (strstr(out, "\"value\":\"1/2\"") == NULL) return 6;
    ht_string_free(out);
    if (ht_curve_new("{\"G\":[\"1\"]", &c) != HT_STATUS_PARSE) return 7;
    if (strlen(ht_last_error()) == 0) return 8;
    ht_recursion_free(r);
    ht_curve_free(c);
    puts("ok");
    return 0;
}
