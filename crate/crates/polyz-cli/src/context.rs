//! Group selection and the error type that carries process exit codes.

use polyz_core::engine::Tower;
use polyz_core::g3::Variant;
use polyz_core::presentation::parse_presentation;
use std::fmt;

/// A failed run. Usage and parse problems exit with code 2; domain
/// failures (not an automorphism, failed verification, benchmark
/// mismatch) exit with code 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Domain(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

/// The resolved group and the run's output options.
pub struct Context {
    pub tower: Tower,
    /// Preset name or presentation file path, echoed in JSON output.
    pub label: String,
    /// Set when the group is one of the four three-step presets.
    pub variant: Option<Variant>,
    /// True for the two-step preset g2.
    pub is_g2: bool,
    pub json: bool,
    pub seed: u64,
    pub count: Option<usize>,
}

/// Resolves the `--group`/`--presentation` selection of `cli` into a
/// tower. Exactly one selector must be present.
pub fn resolve(cli: &crate::Cli) -> Result<Context, CliError> {
    let (tower, label, variant, is_g2) = match (&cli.group, &cli.presentation) {
        (Some(name), None) => {
            let tower = Tower::preset(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset {name:?}; available: {}",
                    Tower::preset_names().join(", ")
                ))
            })?;
            (tower, name.clone(), Variant::from_name(name), name == "g2")
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read {}: {e}", path.display()))
            })?;
            let p = parse_presentation(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let tower = Tower::from_presentation(&p)
                .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
            (tower, path.display().to_string(), None, false)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "select a group with --group <preset> or --presentation <file>".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("--group conflicts with --presentation"),
    };
    Ok(Context {
        tower,
        label,
        variant,
        is_g2,
        json: cli.json,
        seed: cli.seed,
        count: cli.count,
    })
}
