package org.notes.model;

public class Settings {
    public static int fontSize = 12;
    public static String theme = "light";
    public static boolean autosave = true;

    public static int scaled(int factor) {
        return fontSize * factor;
    }
}
