// Prints the PV derate and wind shear exponent that make a scenario's synthesized
// profiles reach the given equivalent hours. Paste the values into the scenario file.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "hres/resources.hpp"
#include "hres/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Calibrate resource synthesis constants"};
    std::string scenario_path;
    double pv_hours = 0.0, wind_hours = 0.0;
    app.add_option("--scenario", scenario_path, "Scenario JSON")->required();
    app.add_option("--pv-hours", pv_hours, "Target PV equivalent hours (default: scenario value)");
    app.add_option("--wind-hours", wind_hours, "Target wind equivalent hours (default: scenario value)");
    CLI11_PARSE(app, argc, argv);
    try {
        const auto sc = hres::load_scenario(scenario_path);
        if (pv_hours <= 0.0) pv_hours = sc.effective.at("solar").value("target_equivalent_hours", 0.0);
        if (wind_hours <= 0.0) wind_hours = sc.effective.at("wind").value("target_equivalent_hours", 0.0);
        if (pv_hours > 0.0) {
            const double derate = hres::calibrate_derate(sc.solar, pv_hours);
            std::printf("solar.derate = %.6f  (%.1f h)\n", derate,
                        hres::synthesize_solar(sc.solar, 1.0, derate).equivalent_hours());
        }
        if (wind_hours > 0.0) {
            const double alpha = hres::calibrate_shear(sc.wind, sc.power_curve, wind_hours);
            auto w = sc.wind;
            w.shear_exponent = alpha;
            std::printf("wind.shear_exponent = %.6f  (%.1f h)\n", alpha,
                        hres::synthesize_wind(w, 1.0, sc.power_curve).equivalent_hours());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
