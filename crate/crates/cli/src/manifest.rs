use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Parameters whose values are output file paths.
pub const OUTPUT_KEYS: &[&str] = &["out", "dump", "acf-out"];

/// Everything needed to re-run a command and get the same bytes back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub output_paths: Vec<String>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// Command line equivalent to this manifest. Output paths are moved into
    /// `out_dir` when given.
    pub fn to_args(&self, out_dir: Option<&Path>) -> Vec<String> {
        let mut args = vec!["qgeom".to_string(), self.command.clone()];
        for (key, value) in &self.parameters {
            match value.as_str() {
                "true" => args.push(format!("--{key}")),
                "false" => {}
                _ => {
                    args.push(format!("--{key}"));
                    if OUTPUT_KEYS.contains(&key.as_str()) {
                        args.push(relocate(value, out_dir).display().to_string());
                    } else {
                        args.push(value.clone());
                    }
                }
            }
        }
        args
    }
}

pub fn relocate(path: &str, out_dir: Option<&Path>) -> PathBuf {
    match (out_dir, Path::new(path).file_name()) {
        (Some(dir), Some(name)) => dir.join(name),
        _ => PathBuf::from(path),
    }
}

/// Resolved parameters of one run, as flag name to text value.
#[derive(Debug, Default, Clone)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    /// 17 significant digits, enough to round-trip any f64.
    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.0.insert(key.into(), format_f64(value));
        self
    }

    pub fn int(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.insert(key.into(), value.to_string());
        self
    }

    pub fn text(&mut self, key: &str, value: &str) -> &mut Self {
        self.0.insert(key.into(), value.into());
        self
    }

    pub fn flag(&mut self, key: &str, on: bool) -> &mut Self {
        if on {
            self.0.insert(key.into(), "true".into());
        }
        self
    }

    pub fn vec3(&mut self, key: &str, v: [f64; 3]) -> &mut Self {
        let text = v
            .iter()
            .map(|x| format_f64(*x))
            .collect::<Vec<_>>()
            .join(",");
        self.0.insert(key.into(), text);
        self
    }

    pub fn path(&mut self, key: &str, path: &Path) -> &mut Self {
        self.0.insert(key.into(), path.display().to_string());
        self
    }

    pub fn into_map(self) -> BTreeMap<String, String> {
        self.0
    }
}

pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            2.998e8,
            4.559_371_244_286_09e-36,
            f64::MIN_POSITIVE,
        ] {
            let text = format_f64(x);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn args_from_manifest() {
        let mut p = Params::default();
        p.num("rate", 25e6)
            .flag("check", true)
            .flag("json", false)
            .text("out", "data/x.csv");
        let m = RunManifest {
            command: "noise".into(),
            parameters: p.into_map(),
            seed: Some(7),
            tool_version: "0".into(),
            output_paths: vec![],
        };
        assert_eq!(
            m.to_args(None),
            [
                "qgeom",
                "noise",
                "--check",
                "--out",
                "data/x.csv",
                "--rate",
                "2.5000000000000000e7"
            ]
        );
        let moved = m.to_args(Some(Path::new("/tmp/replay")));
        assert_eq!(moved[4], "/tmp/replay/x.csv");
    }
}
