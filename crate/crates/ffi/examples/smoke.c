/* Minimal C client: optimal placement and a schedule for a small scenario. */
#include <stdio.h>
#include "uavbs.h"

static const char *SCENARIO =
    "horizon_hours = 12\n"
    "[subregion E]\nwidth = 500\nheight = 1000\npattern = E\n"
    "peak_density = 1e-5\ntrough_density = 5e-6\n";

int main(void) {
    UavbsEnvironment env;
    UavbsModel *model = NULL;
    UavbsPlacement place;
    if (uavbs_environment_preset("urban", &env) != UAVBS_STATUS_OK ||
        uavbs_model_new(&env, &model) != UAVBS_STATUS_OK ||
        uavbs_model_min_static_rf(model, 0.1, 0.5, 1e6 / 3.141592653589793, 1e6, &place) != UAVBS_STATUS_OK) {
        fprintf(stderr, "error: %s\n", uavbs_last_error());
        return 1;
    }
    printf("R* = %.4f m, h* = %.4f m, rf = %.6e 1/s\n", place.radius, place.altitude, place.static_rf);
    uavbs_model_free(model);

    UavbsScenario *sc = NULL;
    UavbsSchedule *sch = NULL;
    UavbsScheduleSummary sum;
    if (uavbs_scenario_parse(SCENARIO, &sc) != UAVBS_STATUS_OK ||
        uavbs_schedule_run(sc, "smgd", 1.5, &sch) != UAVBS_STATUS_OK ||
        uavbs_schedule_summary(sch, &sum) != UAVBS_STATUS_OK) {
        fprintf(stderr, "error: %s\n", uavbs_last_error());
        return 1;
    }
    printf("smgd: %zu updates, average %.6e 1/s\n", sum.updates, sum.avg_dynamic_rf);
    uavbs_schedule_free(sch);
    uavbs_scenario_free(sc);

    if (uavbs_model_new(NULL, &model) != UAVBS_STATUS_NULL_POINTER) return 1;
    printf("null check: %s\n", uavbs_last_error());
    return 0;
}
