#include "bibo/geo.hpp"

#include <cmath>

namespace bibo {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;
}  // namespace

double haversine_m(const LatLon& a, const LatLon& b) {
    const double lat1 = a.lat_deg * kDegToRad;
    const double lat2 = b.lat_deg * kDegToRad;
    const double dlat = (b.lat_deg - a.lat_deg) * kDegToRad;
    const double dlon = (b.lon_deg - a.lon_deg) * kDegToRad;
    const double s1 = std::sin(0.5 * dlat);
    const double s2 = std::sin(0.5 * dlon);
    const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

double initial_bearing_deg(const LatLon& a, const LatLon& b) {
    const double lat1 = a.lat_deg * kDegToRad;
    const double lat2 = b.lat_deg * kDegToRad;
    const double dlon = (b.lon_deg - a.lon_deg) * kDegToRad;
    const double y = std::sin(dlon) * std::cos(lat2);
    const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
    double bearing = std::atan2(y, x) * kRadToDeg;
    if (bearing < 0.0) bearing += 360.0;
    if (bearing >= 360.0) bearing -= 360.0;
    return bearing;
}

LocalProjection::LocalProjection(double origin_lat_deg, double origin_lon_deg)
    : origin_lat_deg_(origin_lat_deg),
      origin_lon_deg_(origin_lon_deg),
      meters_per_deg_lat_(kEarthRadiusM * kDegToRad),
      meters_per_deg_lon_(kEarthRadiusM * kDegToRad * std::cos(origin_lat_deg * kDegToRad)) {}

LatLon LocalProjection::to_latlon(double x_m, double y_m) const {
    return LatLon{origin_lat_deg_ + y_m / meters_per_deg_lat_,
                  origin_lon_deg_ + x_m / meters_per_deg_lon_};
}

}  // namespace bibo
