#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace bibo {

// Empirical BLE RSSI domain, dBm. The floor is exclusive: values at or below
// it are recorded as absent. Values above the ceiling are clamped to it, so
// the valid stored range is (-100, -50].
inline constexpr double kRssiFloorDbm = -100.0;
inline constexpr double kRssiCeilingDbm = -50.0;

// The canonical dataset schema carries one RSSI slot per beacon of the
// five-device network.
inline constexpr std::size_t kRssiSlots = 5;

// Binary passenger state relative to a vehicle. BI is the positive class
// throughout the library.
enum class Bibo : std::uint8_t { BO = 0, BI = 1 };

inline Bibo flipped(Bibo label) { return label == Bibo::BI ? Bibo::BO : Bibo::BI; }

// Smartphone OS activity recognition output, reduced to the binary
// automotive-vs-everything-else decision.
enum class OsActivity : std::uint8_t { Other = 0, Automotive = 1 };

enum class SensorFamily : std::uint8_t { BLE = 0, GPS = 1 };

enum class ModelKind : std::uint8_t { RF = 0, MLP = 1, RANDOM = 2, MAJORITY = 3 };

std::string_view to_string(Bibo label);
std::string_view to_string(OsActivity activity);
std::string_view to_string(SensorFamily family);
std::string_view to_string(ModelKind kind);

Bibo bibo_from_string(std::string_view text);
OsActivity os_activity_from_string(std::string_view text);
SensorFamily sensor_family_from_string(std::string_view text);
ModelKind model_kind_from_string(std::string_view text);

}  // namespace bibo
