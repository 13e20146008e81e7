//! Artifact files of a pipeline workspace.
//!
//! Every text artifact opens with a schema line (`# stereosmell schema 1: <name>`
//! in the comment syntax of its format); JSON documents carry the version
//! as a top-level field instead.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
const TAG: &str = "stereosmell schema";

pub const PROJECTS: &str = "projects.csv";
pub const METRICS: &str = "metrics.csv";
pub const METHODS: &str = "methods.csv";
pub const FEATURES: &str = "features.csv";
pub const SCAN_ERRORS: &str = "scan_errors.txt";
pub const SMELLS: &str = "smells.csv";
pub const INI_DIR: &str = "ini";
pub const ROLES: &str = "roles.csv";
pub const RECORDS: &str = "records.csv";
pub const UNMATCHED: &str = "unmatched.txt";
pub const REPORTS: &str = "reports";
pub const MINING: &str = "mining";
pub const MODEL: &str = "model.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comment {
    /// `# ...`, for CSV, text and `.ini` files.
    Hash,
    /// `<!-- ... -->`, for SVG.
    Xml,
    /// `[...]`, for Newick.
    Bracket,
}

fn header(style: Comment, name: &str) -> String {
    match style {
        Comment::Hash => format!("# {TAG} {SCHEMA_VERSION}: {name}\n"),
        Comment::Xml => format!("<!-- {TAG} {SCHEMA_VERSION}: {name} -->\n"),
        Comment::Bracket => format!("[{TAG} {SCHEMA_VERSION}: {name}]\n"),
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    schema: u32,
    artifact: String,
    data: T,
}

#[derive(Debug, Clone)]
pub struct Workspace {
    root: PathBuf,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workspace { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn exists(&self, rel: &str) -> bool {
        self.path(rel).exists()
    }

    pub fn write(&self, rel: &str, style: Comment, body: &[u8]) -> Result<(), CliError> {
        let path = self.path(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let name = rel.rsplit('/').next().unwrap_or(rel);
        let mut bytes = header(style, name).into_bytes();
        bytes.extend_from_slice(body);
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))
    }

    pub fn write_json<T: Serialize>(&self, rel: &str, data: &T) -> Result<(), CliError> {
        let name = rel.rsplit('/').next().unwrap_or(rel);
        write_json(&self.path(rel), name, data)
    }

    /// Contents after the schema line. A missing file is reported as a
    /// data error naming the stage that produces it.
    pub fn read(&self, rel: &str, producer: &str) -> Result<String, CliError> {
        read_artifact(&self.path(rel), producer)
    }

    pub fn remove_dir(&self, rel: &str) -> Result<(), CliError> {
        let path = self.path(rel);
        if path.exists() {
            fs::remove_dir_all(&path).map_err(|e| io_err(&path, e))?;
        }
        Ok(())
    }
}

pub fn read_artifact(path: &Path, producer: &str) -> Result<String, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Data(format!("{} not found; run `{producer}` first", path.display()))
        } else {
            io_err(path, e)
        }
    })?;
    let Some((first, rest)) = text.split_once('\n') else {
        return Err(CliError::Data(format!("{}: empty artifact", path.display())));
    };
    let version = first
        .trim_start_matches(['#', '<', '!', '-', '['])
        .trim()
        .strip_prefix(TAG)
        .and_then(|s| s.trim().split(':').next())
        .and_then(|v| v.trim().parse::<u32>().ok());
    match version {
        Some(SCHEMA_VERSION) => Ok(rest.to_string()),
        Some(v) => Err(CliError::Data(format!("{}: schema {v}, expected {SCHEMA_VERSION}", path.display()))),
        None => Err(CliError::Data(format!("{}: missing schema line", path.display()))),
    }
}

pub fn write_json<T: Serialize>(path: &Path, artifact: &str, data: &T) -> Result<(), CliError> {
    let env = Envelope { schema: SCHEMA_VERSION, artifact: artifact.to_string(), data };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let env: Envelope<T> =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if env.schema != SCHEMA_VERSION {
        return Err(CliError::Data(format!("{}: schema {}, expected {SCHEMA_VERSION}", path.display(), env.schema)));
    }
    Ok(env.data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_lines_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::new(dir.path());
        ws.write("a/b.csv", Comment::Hash, b"x,y\n1,2\n").unwrap();
        assert_eq!(fs::read_to_string(ws.path("a/b.csv")).unwrap(), "# stereosmell schema 1: b.csv\nx,y\n1,2\n");
        assert_eq!(ws.read("a/b.csv", "scan").unwrap(), "x,y\n1,2\n");
        ws.write("t.svg", Comment::Xml, b"<svg/>\n").unwrap();
        assert_eq!(ws.read("t.svg", "analyze").unwrap(), "<svg/>\n");
        ws.write("t.nwk", Comment::Bracket, b"(a,b);\n").unwrap();
        assert_eq!(ws.read("t.nwk", "mine").unwrap(), "(a,b);\n");
        ws.write_json("m.json", &vec![1, 2]).unwrap();
        assert_eq!(read_json::<Vec<u32>>(&ws.path("m.json")).unwrap(), vec![1, 2]);
    }

    #[test]
    fn missing_and_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::new(dir.path());
        let err = ws.read("smells.csv", "detect").unwrap_err();
        assert!(err.to_string().contains("run `detect` first"));
        fs::write(ws.path("raw.csv"), "a,b\n").unwrap();
        assert!(ws.read("raw.csv", "x").is_err());
        fs::write(ws.path("new.csv"), "# stereosmell schema 9: new.csv\n").unwrap();
        assert!(ws.read("new.csv", "x").unwrap_err().to_string().contains("schema 9"));
    }
}
