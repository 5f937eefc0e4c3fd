//! On-disk storage for resolutions.
//!
//! ```text
//! EXTLAB1
//! version=1
//! module_hash=<sha256 hex>
//! max_s=<n>
//! max_t=<n>
//! counts.<s>=<c_0>,<c_1>,...,<c_max_t>
//! ...
//! body
//! g <s> <index> <degree> <hex>
//! ...
//! end
//! ```
//!
//! `counts.<s>` lists the generator counts of `P_s` by degree. Each `g`
//! line holds the differential of one generator as little-endian hex (see
//! [`BitVec::to_hex`]); lines are sorted by `s` then index.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use extlab_f2::BitVec;

use crate::module::GradedModule;
use crate::resolve::{minimal_resolution, resolution_key, FreeModule, ModuleAction, Resolution, ResolveError};
use crate::steenrod::AlgebraTable;

pub const MAGIC: &str = "EXTLAB1";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt resolution file: {0}")]
    Corrupt(String),
    #[error("resolution file is for module {found}, expected {expected}")]
    HashMismatch { expected: String, found: String },
    #[error("resolution file has format version {found}, this build reads {FORMAT_VERSION}")]
    VersionMismatch { found: String },
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CacheError + '_ {
    move |source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn encode_resolution(r: &Resolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "version={FORMAT_VERSION}");
    let _ = writeln!(out, "module_hash={}", r.module_hash());
    let _ = writeln!(out, "max_s={}", r.max_s());
    let _ = writeln!(out, "max_t={}", r.max_t());
    let chart = r.ext_chart();
    for (s, row) in chart.dims.iter().enumerate() {
        let counts: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "counts.{s}={}", counts.join(","));
    }
    out.push_str("body\n");
    for s in 0..=r.max_s() {
        for (g, &d) in r.generator_degrees(s).iter().enumerate() {
            let _ = writeln!(out, "g {s} {g} {d} {}", r.differential(s, g).to_hex());
        }
    }
    out.push_str("end\n");
    out
}

/// Writes atomically: a temporary file in the same directory, then rename.
pub fn save_resolution(r: &Resolution, path: &Path) -> Result<(), CacheError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "resolution".into());
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    let write = || -> io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(encode_resolution(r).as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(path)(e)
    })
}

pub fn load_resolution(
    table: &AlgebraTable,
    module: Arc<GradedModule>,
    path: &Path,
) -> Result<Resolution, CacheError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    decode_resolution(table, module, &text)
}

pub fn decode_resolution(
    table: &AlgebraTable,
    module: Arc<GradedModule>,
    text: &str,
) -> Result<Resolution, CacheError> {
    let corrupt = |m: &str| CacheError::Corrupt(m.to_string());
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(corrupt("missing magic line"));
    }
    let mut header = BTreeMap::new();
    for line in lines.by_ref() {
        if line == "body" {
            break;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| corrupt("header line without '='"))?;
        header.insert(k.to_string(), v.to_string());
    }
    let field = |k: &str| header.get(k).ok_or_else(|| CacheError::Corrupt(format!("missing header field {k}")));
    let version = field("version")?;
    if version.parse::<u32>().ok() != Some(FORMAT_VERSION) {
        return Err(CacheError::VersionMismatch { found: version.clone() });
    }
    let number = |k: &str| -> Result<usize, CacheError> {
        field(k)?
            .parse()
            .map_err(|_| CacheError::Corrupt(format!("header field {k} is not a number")))
    };
    let max_s = number("max_s")?;
    let max_t = number("max_t")?;
    if module.max_t() < max_t {
        return Err(ResolveError::ModuleTooSmall {
            module_max_t: module.max_t(),
            max_t,
        }
        .into());
    }
    let found = field("module_hash")?.clone();
    let expected = resolution_key(&module, max_t);
    if found != expected {
        return Err(CacheError::HashMismatch { expected, found });
    }
    let mut counts = Vec::with_capacity(max_s + 1);
    for s in 0..=max_s {
        let row: Vec<usize> = field(&format!("counts.{s}"))?
            .split(',')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| CacheError::Corrupt(format!("bad counts for s={s}")))?;
        if row.len() != max_t + 1 {
            return Err(CacheError::Corrupt(format!("counts for s={s} have the wrong length")));
        }
        counts.push(row);
    }

    let mut degrees: Vec<Vec<usize>> = vec![Vec::new(); max_s + 1];
    let mut diffs: Vec<Vec<BitVec>> = vec![Vec::new(); max_s + 1];
    let mut ended = false;
    let mut below: Option<(usize, FreeModule)> = None;
    for line in lines {
        if line == "end" {
            ended = true;
            break;
        }
        let parts: Vec<&str> = line.split(' ').collect();
        let [tag, s, g, d, hex] = parts[..] else {
            return Err(corrupt("malformed generator line"));
        };
        let parse = |x: &str| x.parse::<usize>().map_err(|_| corrupt("malformed generator line"));
        let (s, g, d) = (parse(s)?, parse(g)?, parse(d)?);
        if tag != "g" || s > max_s || g != degrees[s].len() || d > max_t {
            return Err(corrupt("generator lines out of order"));
        }
        if degrees[s].last().is_some_and(|&prev| prev > d) {
            return Err(corrupt("generator degrees out of order"));
        }
        let len = if s == 0 {
            module.dim(d)
        } else {
            if below.as_ref().map(|(bs, _)| *bs) != Some(s - 1) {
                below = Some((s - 1, FreeModule::with_generators(table, max_t, &degrees[s - 1])?));
            }
            below.as_ref().expect("just set").1.dim(d)
        };
        let v = BitVec::from_hex(len, hex).ok_or_else(|| corrupt("bad differential encoding"))?;
        degrees[s].push(d);
        diffs[s].push(v);
    }
    if !ended {
        return Err(corrupt("file is truncated"));
    }
    for s in 0..=max_s {
        let mut row = vec![0; max_t + 1];
        for &d in &degrees[s] {
            row[d] += 1;
        }
        if row != counts[s] {
            return Err(corrupt("generator-count table disagrees with body"));
        }
    }
    Ok(Resolution::from_parts(table, module, max_s, max_t, degrees, diffs)?)
}

/// A directory of resolutions keyed by module hash, bounds and format.
#[derive(Clone, Debug)]
pub struct ResolutionCache {
    dir: PathBuf,
}

impl ResolutionCache {
    pub const ENV_VAR: &'static str = "EXTLAB_CACHE";
    pub const DEFAULT_DIR: &'static str = ".extlab-cache";

    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$EXTLAB_CACHE`, falling back to `.extlab-cache`.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(Self::ENV_VAR).map_or_else(|| PathBuf::from(Self::DEFAULT_DIR), PathBuf::from))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, module: &GradedModule, max_s: usize, max_t: usize) -> PathBuf {
        let key = resolution_key(module, max_t);
        self.dir
            .join(format!("{}-s{max_s}-t{max_t}-v{FORMAT_VERSION}.extres", &key[..16]))
    }

    /// Loads a stored resolution if one is present and valid, otherwise
    /// computes and stores it.
    pub fn get_or_compute(
        &self,
        table: &AlgebraTable,
        module: Arc<GradedModule>,
        max_s: usize,
        max_t: usize,
    ) -> Result<Resolution, CacheError> {
        let path = self.path_for(&module, max_s, max_t);
        if path.exists() {
            match load_resolution(table, Arc::clone(&module), &path) {
                Ok(r) => return Ok(r),
                Err(CacheError::Io { .. }) | Err(CacheError::Corrupt(_)) | Err(CacheError::VersionMismatch { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let r = minimal_resolution(table, module, max_s, max_t)?;
        save_resolution(&r, &path)?;
        Ok(r)
    }
}
