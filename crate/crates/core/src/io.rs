//! JSON plumbing shared by the command line and the C ABI.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::SpaceHandle;

/// Parses JSON, separating syntax errors from schema mismatches.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => Error::Schema(e.to_string()),
            Category::Io | Category::Syntax | Category::Eof => Error::Parse(e.to_string()),
        }
    })
}

/// Inline JSON when `arg` starts with `{` or `[`, otherwise a file path.
pub fn read_arg(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Io(format!("{arg}: {e}")))
    }
}

pub fn load<T: DeserializeOwned>(arg: &str) -> Result<T> {
    parse_json(&read_arg(arg)?)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("library types serialize")
}

impl SpaceHandle {
    /// Parses a space description, reporting weight problems (such as a
    /// `D_p` violation) with their own error codes.
    pub fn from_json(text: &str) -> Result<SpaceHandle> {
        let raw: crate::norms::RawSpace = parse_json(text)?;
        raw.into_handle()
    }
}
