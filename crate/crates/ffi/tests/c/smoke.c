#include <math.h>
#include <stdio.h>
#include "score_ffi.h"

int main(void) {
    const double y[5] = {0.1, -3.0, 0.4, 2.5, -0.05};
    double x[5];
    if (score_hard_threshold(y, 5, 1.0, x) != SCORE_STATUS_OK) return 1;
    if (x[0] != 0.0 || x[1] != -3.0 || x[3] != 2.5) return 2;

    ScoreSelection *sel = NULL;
    if (score_select_threshold(y, 5, 0.2, 0.0, 1.0, 11, SCORE_SPACING_LINEAR, 6.0, 1.0 / 3.0, &sel)
        != SCORE_STATUS_OK)
        return 3;
    if (score_selection_len(sel) != 5 || score_selection_curve_len(sel) != 11) return 4;
    if (score_selection_copy_x_star(sel, x, 5) != SCORE_STATUS_OK) return 5;
    printf("lambda_star=%.17g\n", score_selection_lambda_star(sel));
    score_selection_free(sel);

    double bad[1] = {NAN};
    if (score_edof_ht(bad, 1, 1.0, 1.0, 1.0, x) != SCORE_STATUS_INVALID_INPUT) return 6;
    char msg[128];
    if (score_last_error_message(msg, sizeof msg) == 0) return 7;
    printf("error=%s\n", msg);
    return 0;
}
