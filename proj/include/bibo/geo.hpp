#pragma once

namespace bibo {

inline constexpr double kEarthRadiusM = 6371000.0;

struct LatLon {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

// Great-circle distance in meters.
double haversine_m(const LatLon& a, const LatLon& b);

// Initial bearing from a to b, degrees in [0, 360).
double initial_bearing_deg(const LatLon& a, const LatLon& b);

// Equirectangular mapping between a local plane (meters, x east / y north)
// and lat/lon around a fixed origin. Good to centimeter error at the
// sub-kilometer extents simulated here.
class LocalProjection {
public:
    LocalProjection(double origin_lat_deg, double origin_lon_deg);

    LatLon to_latlon(double x_m, double y_m) const;

    double origin_lat_deg() const { return origin_lat_deg_; }
    double origin_lon_deg() const { return origin_lon_deg_; }

private:
    double origin_lat_deg_;
    double origin_lon_deg_;
    double meters_per_deg_lat_;
    double meters_per_deg_lon_;
};

}  // namespace bibo
