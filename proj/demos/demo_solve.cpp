/// Solve the three benchmark sag cases and print the JSON report for each,
/// one per support stage: boundary injection (S1), power-capped arc (S2),
/// and the deep-sag interior optimum (S3).

#include <cstdio>

#include <dvsopt/serialize.hpp>

int main() {
    using namespace dvsopt;
    const PowerConvention pu = PowerConvention::pu();

    struct Case {
        const char* name;
        GridModel g;
        InverterLimits lim;
    };
    const Case cases[] = {
        {"moderate sag, ample power cap",
         GridModel(0.4, 0.089443, 0.044721), InverterLimits(1.5, 0.9656)},
        {"moderate sag, tight power cap",
         GridModel(0.4, 0.089443, 0.044721), InverterLimits(1.5, 0.3816)},
        {"deep sag",
         GridModel(0.08, 0.089443, 0.044721), InverterLimits(1.5, 0.0924)},
    };

    for (const Case& c : cases) {
        std::printf("# %s\n", c.name);
        std::fputs(to_json(solve(c.g, pu, c.lim), c.lim).c_str(), stdout);
    }
    return 0;
}
