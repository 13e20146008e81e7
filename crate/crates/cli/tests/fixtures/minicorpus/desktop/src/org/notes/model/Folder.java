package org.notes.model;

public class Folder {
    private String name;

    public String getName() {
        return name;
    }
}
