package org.notes.ui;

import java.io.IOException;
import java.io.Writer;
import org.notes.model.Note;

public interface Exporter {
    void export(Note note, Writer out) throws IOException;
}
