use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Largest internal degree the tool accepts.
pub const MAX_DEGREE: usize = 64;
pub const MAX_FILTRATION: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "extlab", version, about = "Ext over the mod 2 Steenrod algebra and Adams charts of a few fibers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal resolution of a module and its Ext chart
    Resolve(ResolveArgs),
    /// Build, assemble and check the E3 chart of a fiber
    Scenario(ScenarioArgs),
    /// Run the verification suites
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Bounds {
    #[arg(long, default_value_t = 12)]
    pub max_s: usize,
    #[arg(long, default_value_t = 28)]
    pub max_t: usize,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Ascii)]
    pub format: Format,
    /// Write here instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    /// Resolution cache directory
    #[arg(long, env = "EXTLAB_CACHE", default_value = ".extlab-cache")]
    pub cache_dir: PathBuf,
    /// Neither read nor write the cache
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    /// f2 | a | a-mod-sq1 | free:<shift>,<shift>,...
    #[arg(long)]
    pub module: ModuleSelector,
    #[command(flatten)]
    pub bounds: Bounds,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Required for fn and fnz
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub bounds: Bounds,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ascii,
    Svg,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Ascii,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Fn,
    Fnz,
    F,
    FConj,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Steenrod,
    Resolution,
    Les,
    Scenarios,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleSelector {
    F2,
    A,
    AModSq1,
    Free(Vec<usize>),
}

impl FromStr for ModuleSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f2" => Ok(Self::F2),
            "a" => Ok(Self::A),
            "a-mod-sq1" => Ok(Self::AModSq1),
            _ => {
                let Some(list) = s.strip_prefix("free:") else {
                    return Err(format!("unknown module {s:?}; expected f2, a, a-mod-sq1 or free:<shifts>"));
                };
                let shifts = list
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad shift {x:?} in {s:?}")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Self::Free(shifts))
            }
        }
    }
}

impl fmt::Display for ModuleSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::F2 => f.write_str("f2"),
            Self::A => f.write_str("a"),
            Self::AModSq1 => f.write_str("a-mod-sq1"),
            Self::Free(shifts) => {
                let list: Vec<String> = shifts.iter().map(usize::to_string).collect();
                write!(f, "free:{}", list.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_selectors() {
        assert_eq!("f2".parse(), Ok(ModuleSelector::F2));
        assert_eq!("free:0,3".parse(), Ok(ModuleSelector::Free(vec![0, 3])));
        assert!("free:".parse::<ModuleSelector>().is_err());
        assert!("free:1,-2".parse::<ModuleSelector>().is_err());
        assert!("b".parse::<ModuleSelector>().is_err());
        assert_eq!(ModuleSelector::Free(vec![2, 5]).to_string(), "free:2,5");
    }
}
