//! Run configuration: an optional `key = value` file overlaid by flags,
//! validated in full before any computation starts.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use polyosc::config::{self, Value};
use polyosc::{AlgebraSpec, ResolutionMode};

/// Keys accepted in a config file. Hyphens and underscores are interchangeable.
pub const CONFIG_KEYS: &[&str] = &[
    "kappas", "phi", "family", "z_re", "z_im", "order", "cutoff", "tol", "format", "out", "suite", "seed", "resolution",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateFamily {
    Perelomov,
    Bg,
    GrassmannBg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Every suite that applies to the spec.
    #[value(alias = "default")]
    All,
    Algebra,
    Fock,
    Quon,
    Grassmann,
    Coherent,
    Measures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Resolution {
    Strict,
    UpToPhase,
}

/// Flags shared by every subcommand. Each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Deformation parameters, comma separated. Exact ratios such as `-1/3`
    /// are preferred; a decimal κ₁ < 0 is accepted only when −1/κ₁ is an
    /// integer to within 1e-12 relative.
    #[arg(long, allow_hyphen_values = true, value_name = "LIST")]
    pub kappas: Option<String>,
    /// Phase parameter φ.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Coherent-state family (state and measure commands).
    #[arg(long, value_enum)]
    pub family: Option<StateFamily>,
    #[arg(long = "z-re", allow_hyphen_values = true)]
    pub z_re: Option<String>,
    #[arg(long = "z-im", allow_hyphen_values = true)]
    pub z_im: Option<String>,
    /// Table length, Grassmann or quon order k, or number of frame rows.
    #[arg(long)]
    pub order: Option<usize>,
    /// Truncation order s for infinite specs, or the series cap for states.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Residual tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Verification suite.
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Seed for randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grassmann resolution-of-identity mode.
    #[arg(long, value_enum)]
    pub resolution: Option<Resolution>,
    /// Config file of `key = value` lines using the flag names as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully validated settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: AlgebraSpec,
    pub family: Option<StateFamily>,
    pub z: Complex64,
    pub order: Option<usize>,
    pub cutoff: Option<usize>,
    pub tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub suite: Suite,
    pub seed: u64,
    pub resolution: ResolutionMode,
}

/// A configuration problem, reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Res<T> = Result<T, ConfigError>;

/// A raw value and where it came from, for diagnostics.
struct Raw {
    origin: String,
    value: Value,
}

impl Raw {
    fn flag(name: &str, text: String) -> Self {
        Self {
            origin: format!("--{name}"),
            value: Value::Scalar(text),
        }
    }

    fn fail<T>(&self, message: impl std::fmt::Display) -> Res<T> {
        Err(ConfigError(format!("{}: {message}", self.origin)))
    }

    fn real(&self) -> Res<f64> {
        self.value.as_real().or_else(|m| self.fail(m))
    }

    fn text(&self) -> Res<&str> {
        self.value.as_str().or_else(|m| self.fail(m))
    }

    fn parse<T: std::str::FromStr>(&self) -> Res<T> {
        let text = self.text()?;
        text.parse().or_else(|_| self.fail(format!("invalid value `{text}`")))
    }

    fn choice<T: ValueEnum>(&self) -> Res<T> {
        let text = self.text()?;
        T::from_str(text, true).or_else(|_| self.fail(format!("invalid value `{text}`")))
    }

    fn list(&self) -> Vec<String> {
        match &self.value {
            Value::List(items) => items.clone(),
            Value::Scalar(s) => s
                .trim()
                .trim_start_matches('[')
                .trim_end_matches(']')
                .split(',')
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect(),
        }
    }
}

fn read_file(path: &Path) -> Res<Vec<(String, Raw)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let map = config::parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for key in map.keys() {
        let (line, value) = map.get(key).expect("key listed by the map");
        let canonical = key.replace('-', "_");
        if !CONFIG_KEYS.contains(&canonical.as_str()) {
            return Err(ConfigError(format!("{}: line {line}: unknown key `{key}`", path.display())));
        }
        out.push((
            canonical,
            Raw {
                origin: format!("{}: line {line}: `{key}`", path.display()),
                value: value.clone(),
            },
        ));
    }
    Ok(out)
}

impl CommonArgs {
    pub fn resolve(&self) -> Res<RunConfig> {
        let mut raw: Vec<(String, Raw)> = match &self.config {
            Some(path) => read_file(path)?,
            None => Vec::new(),
        };
        let mut set = |key: &str, text: Option<String>| {
            if let Some(text) = text {
                raw.retain(|(k, _)| k != key);
                raw.push((key.to_string(), Raw::flag(&key.replace('_', "-"), text)));
            }
        };
        set("kappas", self.kappas.clone());
        set("phi", self.phi.clone());
        set("family", self.family.map(|f| enum_name(&f)));
        set("z_re", self.z_re.clone());
        set("z_im", self.z_im.clone());
        set("order", self.order.map(|v| v.to_string()));
        set("cutoff", self.cutoff.map(|v| v.to_string()));
        set("tol", self.tol.clone());
        set("format", self.format.map(|f| enum_name(&f)));
        set("out", self.out.as_ref().map(|p| p.display().to_string()));
        set("suite", self.suite.map(|s| enum_name(&s)));
        set("seed", self.seed.map(|v| v.to_string()));
        set("resolution", self.resolution.map(|r| enum_name(&r)));

        let get = |key: &str| raw.iter().find(|(k, _)| k == key).map(|(_, r)| r);

        let phi = get("phi").map(Raw::real).transpose()?.unwrap_or(0.0);
        let kappas_raw = get("kappas").ok_or_else(|| ConfigError("missing kappas (use --kappas or a config file)".into()))?;
        let kappas = kappas_raw
            .list()
            .iter()
            .map(|s| config::parse_real(s).or_else(|m| kappas_raw.fail(m)))
            .collect::<Res<Vec<_>>>()?;
        let spec = AlgebraSpec::new(kappas, phi).or_else(|e| kappas_raw.fail(e))?;

        let z = Complex64::new(
            get("z_re").map(Raw::real).transpose()?.unwrap_or(0.5),
            get("z_im").map(Raw::real).transpose()?.unwrap_or(0.0),
        );
        let tol = get("tol").map(Raw::real).transpose()?;
        if let (Some(t), Some(r)) = (tol, get("tol")) {
            if t <= 0.0 {
                return r.fail("tolerance must be positive");
            }
        }
        let resolution = match get("resolution").map(Raw::choice::<Resolution>).transpose()? {
            Some(Resolution::UpToPhase) => ResolutionMode::UpToPhase,
            _ => ResolutionMode::Strict,
        };
        Ok(RunConfig {
            spec,
            family: get("family").map(Raw::choice).transpose()?,
            z,
            order: get("order").map(Raw::parse).transpose()?,
            cutoff: get("cutoff").map(Raw::parse).transpose()?,
            tol,
            format: get("format").map(Raw::choice).transpose()?.unwrap_or(Format::Pretty),
            out: get("out").map(|r| r.text().map(PathBuf::from)).transpose()?,
            suite: get("suite").map(Raw::choice).transpose()?.unwrap_or(Suite::All),
            seed: get("seed").map(Raw::parse).transpose()?.unwrap_or(0),
            resolution,
        })
    }
}

fn enum_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(kappas: &str) -> CommonArgs {
        CommonArgs {
            kappas: Some(kappas.into()),
            ..CommonArgs::default()
        }
    }

    #[test]
    fn kappa_lists_accept_brackets_and_ratios() {
        let cfg = args("[-1/4, 0.5]").resolve().unwrap();
        assert_eq!(cfg.spec.dim(), Some(5));
        assert_eq!(cfg.spec.kappas()[1], 0.5);
        assert_eq!(cfg.format, Format::Pretty);
        assert_eq!(cfg.suite, Suite::All);
    }

    #[test]
    fn invalid_values_name_their_origin() {
        let mut a = args("0");
        a.tol = Some("-1".into());
        assert!(a.resolve().unwrap_err().0.starts_with("--tol"));
        assert!(args("0, x").resolve().unwrap_err().0.contains("--kappas"));
        assert!(CommonArgs::default().resolve().unwrap_err().0.contains("missing kappas"));
    }

    #[test]
    fn hyphenated_config_keys_are_accepted() {
        let dir = std::env::temp_dir().join(format!("polyosc-settings-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "kappas = [0]\nz-re = 0.25\nz_im = -1\nresolution = up-to-phase\n").unwrap();
        let cfg = CommonArgs {
            config: Some(path),
            ..CommonArgs::default()
        }
        .resolve()
        .unwrap();
        std::fs::remove_dir_all(&dir).unwrap();
        assert_eq!(cfg.z, Complex64::new(0.25, -1.0));
        assert_eq!(cfg.resolution, ResolutionMode::UpToPhase);
    }
}
