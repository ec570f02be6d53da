use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Reads a JSON file, reporting the failing field path on schema errors.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_json(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> anyhow::Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow::anyhow!("at `{path}`: {}", e.into_inner())
    })
}

/// Directory that receives a command's artifacts.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: PathBuf) -> anyhow::Result<Self> {
        fs::create_dir_all(&root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> anyhow::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> anyhow::Result<PathBuf> {
        let p = self.path(name);
        fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }

    /// Writes a CSV built by `fill`.
    pub fn write_csv<F>(&self, name: &str, fill: F) -> anyhow::Result<PathBuf>
    where
        F: FnOnce(&mut csv::Writer<Vec<u8>>) -> anyhow::Result<()>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        fill(&mut w)?;
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
        self.write(name, &bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fbq_core::SimConfig;

    #[test]
    fn schema_errors_name_the_field() {
        let err = parse_json::<SimConfig>(
            r#"{"num_users": 1, "num_bands": 2, "bands": [[0, 1]], "budget": "twelve",
                "snr_db": [0], "arrival_rate": [0.1], "policy": "equal-static"}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("`budget`"), "{err}");

        let err = parse_json::<SimConfig>(
            r#"{"num_users": 1, "num_bands": 2, "bands": [[0, 1]], "budget": 2,
                "snr_db": [0], "arrival_rate": [0.1], "policy": "fastest"}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("`policy`"), "{err}");
    }
}
