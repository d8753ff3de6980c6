#include <math.h>
#include <stdio.h>
#include "geoflow.h"

int main(void) {
    GeoflowChart *chart = NULL;
    if (geoflow_chart_new("{\"id\": \"revolution\", \"params\": {\"f\": \"sin\", \"coords\": \"polar\"}}", &chart) != GEOFLOW_STATUS_OK) {
        fprintf(stderr, "chart: %s\n", geoflow_last_error());
        return 1;
    }
    double k = 0.0;
    if (geoflow_chart_curvature(chart, 1.0, 0.5, &k) != GEOFLOW_STATUS_OK || fabs(k - 1.0) > 1e-9) {
        return 2;
    }
    geoflow_chart_free(chart);
    if (geoflow_chart_new("{\"id\": \"nope\"}", &chart) != GEOFLOW_STATUS_INVALID_ARGUMENT || chart != NULL) {
        return 3;
    }
    GeoflowPolygonResult g;
    if (geoflow_polygon_geodesic("square", &g) != GEOFLOW_STATUS_OK || !g.embedded) {
        return 4;
    }
    printf("geoflow %s: square loop length %.6f\n", geoflow_version(), g.length);
    return 0;
}
