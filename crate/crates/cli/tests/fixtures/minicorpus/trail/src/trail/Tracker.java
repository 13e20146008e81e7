package trail;

public class Tracker {
    public double lat;
    public double lon;

    public void update(double lat, double lon, double altitude, float accuracy, long time, String provider, int satellites) {
        this.lat = lat;
        this.lon = lon;
    }

    public double distanceTo(Tracker other) {
        double dx = other.lat - lat;
        double dy = other.lon - lon;
        return Math.sqrt(dx * dx + dy * dy);
    }
}
