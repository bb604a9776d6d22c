use std::io::Write;
use std::path::Path;

use multiverse::Error as CoreError;

/// Failure carrying the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad input or parameters, or any module error: status 1.
    Invalid(String),
    /// Nothing to explain: status 3.
    NoCandidates(String),
    /// Reading or writing files: status 4.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::NoCandidates(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::NoCandidates(m) | CliError::Io(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match &e {
            CoreError::Io(_) => CliError::Io(e.to_string()),
            CoreError::Csv(c) if c.is_io_error() => CliError::Io(e.to_string()),
            CoreError::NoReachableCandidates => CliError::NoCandidates(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

pub fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes to a sibling temporary file and renames it into place, so a failed
/// run never leaves a partial file behind. `None` means standard output.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Io(e.to_string()));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Invalid(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}
