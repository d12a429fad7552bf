//! Layered run configuration: defaults, then a `key = value` file, then the
//! `CURVLAB_SEED` environment variable, then command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use curvlab::report::{Format, RunConfig};

/// Overrides from one configuration layer.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub r_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub frame_budget: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.r_max {
            cfg.r_max = v;
        }
        if let Some(v) = self.grid_points {
            cfg.grid_points = v;
        }
        if let Some(v) = self.frame_budget {
            cfg.frame_budget = v;
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow::anyhow!("line {line}: bad value `{value}` for `{key}`: {e}"))
}

/// Parses flat `key = value` lines; `#` starts a comment. Keys may use
/// dashes or underscores.
pub fn parse_config(text: &str) -> Result<Overrides> {
    let mut out = Overrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            bail!("line {line}: expected `key = value`, got `{content}`");
        };
        let key = key.trim().replace('-', "_");
        let value = value.trim().trim_matches('"');
        match key.as_str() {
            "seed" => out.seed = Some(parse(&key, value, line)?),
            "r_max" => out.r_max = Some(parse(&key, value, line)?),
            "grid_points" => out.grid_points = Some(parse(&key, value, line)?),
            "frame_budget" => out.frame_budget = Some(parse(&key, value, line)?),
            "output_dir" | "out" => out.output_dir = Some(PathBuf::from(value)),
            "format" => out.format = Some(parse(&key, value, line)?),
            other => bail!("line {line}: unknown key `{other}`"),
        }
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config file {}", path.display()))
}

/// `CURVLAB_SEED`, if set.
pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var("CURVLAB_SEED") {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| {
            format!("CURVLAB_SEED = `{v}` is not an unsigned integer")
        })?)),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("CURVLAB_SEED: {e}"),
    }
}

pub fn resolve(file: Option<&Path>, env_seed: Option<u64>, flags: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = file {
        load_config(path)?.apply(&mut cfg);
    }
    if let Some(seed) = env_seed {
        cfg.seed = seed;
    }
    flags.apply(&mut cfg);
    cfg.validate().map_err(anyhow::Error::msg)?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let o = parse_config("# run\nseed = 7\nr-max=4.5 # half\n\nformat = csv\nout = \"x/y\"\n")
            .unwrap();
        assert_eq!(o.seed, Some(7));
        assert_eq!(o.r_max, Some(4.5));
        assert_eq!(o.format, Some(Format::Csv));
        assert_eq!(o.output_dir, Some(PathBuf::from("x/y")));
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("seed 3").is_err());
        assert!(parse_config("seed = -1").is_err());
    }

    #[test]
    fn precedence() {
        let dir = std::env::temp_dir().join(format!("curvlab-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "seed = 1\ngrid_points = 11\nframe_budget = 5\n").unwrap();
        let flags = Overrides {
            frame_budget: Some(9),
            ..Default::default()
        };
        let cfg = resolve(Some(&path), Some(2), &flags).unwrap();
        assert_eq!((cfg.seed, cfg.grid_points, cfg.frame_budget), (2, 11, 9));
        let flags = Overrides {
            seed: Some(3),
            ..Default::default()
        };
        assert_eq!(resolve(Some(&path), Some(2), &flags).unwrap().seed, 3);
        assert!(resolve(
            None,
            None,
            &Overrides {
                grid_points: Some(0),
                ..Default::default()
            }
        )
        .is_err());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
