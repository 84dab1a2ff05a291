//! Run configuration: defaults, an optional key=value config file, and flag
//! overrides (flags win).

use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub tolerance: f64,
    pub contraction_limit: usize,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: 1e-9,
            // verification sweeps strip arrow expansions, which carry many
            // more wires than the thick diagrams they come from
            contraction_limit: 128,
            seed: 7,
            format: OutputFormat::Text,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.tolerance.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            ));
        }
        if self.contraction_limit < 4 {
            return Err(format!(
                "contraction limit must be at least 4, got {}",
                self.contraction_limit
            ));
        }
        Ok(())
    }

    /// Parse a `key = value` config file. Unknown keys are rejected; `#`
    /// starts a comment.
    pub fn load_file(&mut self, path: &Path) -> Result<(), String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {} is not key=value: `{raw}`", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "tolerance" | "tol" => {
                    self.tolerance = value
                        .parse()
                        .map_err(|_| format!("bad tolerance `{value}`"))?;
                }
                "limit" | "contraction_limit" => {
                    self.contraction_limit =
                        value.parse().map_err(|_| format!("bad limit `{value}`"))?;
                }
                "seed" => {
                    self.seed = value.parse().map_err(|_| format!("bad seed `{value}`"))?;
                }
                "format" | "output" => {
                    self.format = match value {
                        "text" => OutputFormat::Text,
                        "json" => OutputFormat::Json,
                        other => return Err(format!("bad format `{other}`")),
                    };
                }
                other => return Err(format!("unknown config key `{other}`")),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_then_flags() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\ntolerance = 1e-6\nseed=42\nformat = json").unwrap();
        let mut cfg = RunConfig::default();
        cfg.load_file(f.path()).unwrap();
        assert_eq!(cfg.tolerance, 1e-6);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.format, OutputFormat::Json);
        cfg.validate().unwrap();
    }

    #[test]
    fn bad_keys_are_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "tolerence = 1e-6").unwrap();
        let mut cfg = RunConfig::default();
        assert!(cfg.load_file(f.path()).is_err());
    }
}
