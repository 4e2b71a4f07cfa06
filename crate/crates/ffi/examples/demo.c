/* cc -I crates/ffi/include crates/ffi/examples/demo.c -L target/debug -lqnahm_ffi -o demo */
#include <stdio.h>
#include "qnahm.h"

int main(void) {
    int64_t a[] = {2};
    QnSeries *s = NULL;
    if (qn_nahm_sum(1, a, NULL, NULL, NULL, 0, 1, 12, &s) != QN_STATUS_OK) {
        fprintf(stderr, "%s\n", qn_last_error());
        return 1;
    }
    for (int e = 0; e < 12; e++) {
        char *c = qn_series_coeff_str(s, 0, e, 1);
        printf("q^%d: %s\n", e, c);
        qn_string_free(c);
    }
    qn_series_free(s);

    QnReport *r = NULL;
    QnStatus st = qn_verify_builtin("thm11", "{\"k\": 3, \"lambda\": 1, \"which\": \"3\"}", 20, false, &r);
    char *json = qn_report_json(r);
    printf("status %d: %s\n", (int)st, json);
    qn_string_free(json);
    qn_report_free(r);
    return st == QN_STATUS_OK ? 0 : 1;
}
