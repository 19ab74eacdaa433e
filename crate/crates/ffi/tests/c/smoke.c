#include <math.h>
#include <stdio.h>

#include "ucorr.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        UcorrStatus s_ = (call);                                           \
        if (s_ != UCORR_STATUS_OK) {                                       \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_,              \
                    ucorr_last_error());                                   \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    UcorrTarget *t = NULL;
    UcorrProtocol *p = NULL;
    UcorrMatrix *x = NULL;
    double overlap, lower, upper, min_eig;
    bool member, valid;

    CHECK(ucorr_target_maximally_entangled(2, 2, &t));
    CHECK(ucorr_protocol_new(t, 31, &p));
    CHECK(ucorr_protocol_overlap(p, &overlap));
    if (!(overlap > 0.99)) {
        fprintf(stderr, "overlap %.17g\n", overlap);
        return 1;
    }

    CHECK(ucorr_protocol_correlation(p, &x));
    CHECK(ucorr_qmax_certify(x, 2, 2, &min_eig, &valid));
    if (!valid) {
        fprintf(stderr, "protocol correlation not certified: %.17g\n", min_eig);
        return 1;
    }
    ucorr_matrix_free(x);

    CHECK(ucorr_limit_correlation(t, &x));
    CHECK(ucorr_loc_membership(x, 2, 2, &member, &upper));
    CHECK(ucorr_projective_norm(x, 2, 2, &lower, &upper));
    if (member || fabs(lower - sqrt(2.0)) > 1e-9) {
        fprintf(stderr, "limit: member %d, pi %.17g\n", member, lower);
        return 1;
    }

    UcorrComplex bad[4] = {{1, 0}, {1, 0}, {0, 0}, {0, 0}};
    UcorrTarget *u = NULL;
    if (ucorr_target_new(bad, 2, 2, &u) != UCORR_STATUS_NOT_UNIT_VECTOR || u != NULL) {
        fprintf(stderr, "non-unit target accepted\n");
        return 1;
    }

    ucorr_matrix_free(x);
    ucorr_protocol_free(p);
    ucorr_target_free(t);
    printf("ok %s\n", ucorr_version());
    return 0;
}
