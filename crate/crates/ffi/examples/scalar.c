#include <stdio.h>
#include "sasaki.h"

int main(int argc, char **argv) {
    if (argc < 2) {
        fprintf(stderr, "usage: %s model.toml\n", argv[0]);
        return 2;
    }
    SasakiModel *model = NULL;
    if (sasaki_model_open(argv[1], &model) != SASAKI_STATUS_OK) {
        fprintf(stderr, "error: %s\n", sasaki_last_error());
        return 2;
    }
    double scalar = 0.0;
    sasaki_model_scalar_curvature(model, &scalar);
    printf("%.17g\n", scalar);
    sasaki_model_free(model);
    return 0;
}
