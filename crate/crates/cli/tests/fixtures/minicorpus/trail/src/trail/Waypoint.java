package trail;

public class Waypoint {
    private String name;

    public String getName() {
        return name;
    }
}
