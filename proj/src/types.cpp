#include "bibo/types.hpp"

#include "bibo/errors.hpp"

namespace bibo {

std::string_view to_string(Bibo label) { return label == Bibo::BI ? "BI" : "BO"; }

std::string_view to_string(OsActivity activity) {
    return activity == OsActivity::Automotive ? "automotive" : "other";
}

std::string_view to_string(SensorFamily family) {
    return family == SensorFamily::BLE ? "BLE" : "GPS";
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::RF: return "RF";
        case ModelKind::MLP: return "MLP";
        case ModelKind::RANDOM: return "RANDOM";
        case ModelKind::MAJORITY: return "MAJORITY";
    }
    return "RF";
}

Bibo bibo_from_string(std::string_view text) {
    if (text == "BI") return Bibo::BI;
    if (text == "BO") return Bibo::BO;
    throw SchemaError("unknown BIBO label '" + std::string(text) + "' (expected BI or BO)");
}

OsActivity os_activity_from_string(std::string_view text) {
    if (text == "automotive") return OsActivity::Automotive;
    if (text == "other") return OsActivity::Other;
    throw SchemaError("unknown os_activity '" + std::string(text) +
                      "' (expected automotive or other)");
}

SensorFamily sensor_family_from_string(std::string_view text) {
    if (text == "BLE") return SensorFamily::BLE;
    if (text == "GPS") return SensorFamily::GPS;
    throw SchemaError("unknown sensor family '" + std::string(text) + "' (expected BLE or GPS)");
}

ModelKind model_kind_from_string(std::string_view text) {
    if (text == "RF") return ModelKind::RF;
    if (text == "MLP") return ModelKind::MLP;
    if (text == "RANDOM") return ModelKind::RANDOM;
    if (text == "MAJORITY") return ModelKind::MAJORITY;
    throw SchemaError("unknown model kind '" + std::string(text) + "'");
}

}  // namespace bibo
