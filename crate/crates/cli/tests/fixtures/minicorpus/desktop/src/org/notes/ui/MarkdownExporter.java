package org.notes.ui;

import java.io.IOException;
import java.io.Writer;
import org.notes.model.Note;

public class MarkdownExporter implements Exporter {
    @Override
    public void export(Note note, Writer out) throws IOException {
        out.write("# " + note.getTitle() + "\n");
        for (String tag : note.getTags()) {
            out.write("- " + tag + "\n");
        }
    }
}
