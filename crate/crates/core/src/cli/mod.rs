//! Command-line front end: `draw`, `real` and `hausdorff`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input (parse errors,
//! empty or mismatched sets, bad options), 3 effort ceiling reached.

pub mod cache;
pub mod expr;

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::dyadic::Dyadic;
use crate::error::{EffortExhausted, ParseError, SetError};
use crate::fractal::{ifs_tb, sierpinski_tb, triangle_tb, Ifs, MAX_LEVEL};
use crate::kernel::set_effort_ceiling;
use crate::space::Point;
use crate::tbound::{empty_tb, export_point, hausdorff_tb, singleton_tb, tb_affine, tb_union, CoveringRecord, TBSet};

use self::cache::{write_atomic, CoveringCache};
use self::expr::{RealExpr, SetExpr};
use crate::render::{self, Format, Viewport};

pub const DEFAULT_EFFORT_CEILING: u32 = 1 << 24;
pub const DEFAULT_LEVEL_CAP: u32 = 20;
/// Worker threads used to export a covering.
const MAX_THREADS: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "certoset", version, about = "Certified coverings, distances and exact reals")]
pub struct Cli {
    /// Largest effort any approximation may use before giving up (exit 3).
    #[arg(long, global = true, default_value_t = DEFAULT_EFFORT_CEILING)]
    pub effort_ceiling: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Export the level-N covering of a set.
    Draw {
        /// Set expression, e.g. `union(triangle, translate(sierpinski, 1, 0))`.
        #[arg(long)]
        set: String,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Output file (written atomically); stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `x0,y0,x1,y1`, SVG only. Defaults to `-1.25,-1.25,1.25,1.25`.
        #[arg(long, allow_hyphen_values = true)]
        viewport: Option<Viewport>,
        /// Centers are rounded to multiples of `2^-precision`; at least the level.
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_LEVEL_CAP)]
        level_cap: u32,
    },
    /// Print a `2^-prec` approximation of a real expression.
    Real {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        prec: u32,
    },
    /// Print a `2^-prec` approximation of the Hausdorff distance of two sets.
    Hausdorff {
        #[arg(long = "a")]
        a: String,
        #[arg(long = "b")]
        b: String,
        #[arg(long)]
        prec: u32,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

/// Builds sets from expressions. Equal subexpressions share one handle, so
/// e.g. the distance of a set to itself is recognized as zero.
#[derive(Default)]
pub struct SetBuilder {
    memo: HashMap<String, TBSet>,
    files: HashMap<PathBuf, (Ifs, String)>,
}

impl SetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn ifs(&mut self, path: &Path) -> Result<(Ifs, String), CliError> {
        if let Some(hit) = self.files.get(path) {
            return Ok(hit.clone());
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("cannot read IFS file {}: {e}", path.display())))?;
        let ifs = Ifs::from_json(&text)?;
        let digest: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        self.files.insert(path.to_path_buf(), (ifs.clone(), digest.clone()));
        Ok((ifs, digest))
    }

    /// Normalized expression text plus the content digest of every IFS file.
    pub fn key(&mut self, e: &SetExpr) -> Result<String, CliError> {
        let mut key = e.to_string();
        let mut paths = Vec::new();
        collect_files(e, &mut paths);
        for p in paths {
            let (_, digest) = self.ifs(&p)?;
            key.push_str(&format!("|{}={digest}", p.display()));
        }
        Ok(key)
    }

    pub fn build(&mut self, e: &SetExpr) -> Result<TBSet, CliError> {
        let key = self.key(e)?;
        if let Some(s) = self.memo.get(&key) {
            return Ok(s.clone());
        }
        let set = match e {
            SetExpr::Triangle => triangle_tb(),
            SetExpr::Sierpinski => sierpinski_tb(),
            SetExpr::Empty(m) => empty_tb(*m),
            SetExpr::Singleton(xs) => singleton_tb(point(xs)?),
            SetExpr::Ifs(p) => ifs_tb(&self.ifs(p)?.0),
            SetExpr::Union(parts) => {
                let mut acc = self.build(&parts[0])?;
                for p in &parts[1..] {
                    acc = tb_union(&acc, &self.build(p)?)?;
                }
                acc
            }
            SetExpr::Translate(s, t) => tb_affine(&Dyadic::one(), &point(t)?, &self.build(s)?)?,
            SetExpr::Scale(s, c) => {
                let inner = self.build(s)?;
                tb_affine(c, &Point::origin(inner.dimension()), &inner)?
            }
        };
        self.memo.insert(key, set.clone());
        Ok(set)
    }
}

fn collect_files(e: &SetExpr, out: &mut Vec<PathBuf>) {
    match e {
        SetExpr::Ifs(p) if !out.contains(p) => out.push(p.clone()),
        SetExpr::Union(parts) => parts.iter().for_each(|p| collect_files(p, out)),
        SetExpr::Translate(s, _) | SetExpr::Scale(s, _) => collect_files(s, out),
        _ => {}
    }
}

fn point(xs: &[RealExpr]) -> Result<Point, CliError> {
    Ok(Point::new(xs.iter().map(RealExpr::eval).collect::<Result<Vec<_>, _>>()?))
}

/// The level-`level` covering with centers rounded to `2^-precision`,
/// exported on a bounded pool. Output order is the covering order.
pub fn export_covering(set: &TBSet, level: u32, precision: u32) -> CoveringRecord {
    let covering = set.covering(level);
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(MAX_THREADS);
    let centers = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| covering.par_iter().map(|p| export_point(p, precision)).collect()),
        Err(_) => covering.iter().map(|p| export_point(p, precision)).collect(),
    };
    CoveringRecord {
        level,
        radius_exponent: -i64::from(level),
        centers,
        dimension: set.dimension(),
    }
}

pub struct DrawRequest<'a> {
    pub set: &'a str,
    pub level: u32,
    pub format: Format,
    pub viewport: Option<Viewport>,
    pub precision: Option<u32>,
    pub level_cap: u32,
}

/// Validates a draw request and renders it.
pub fn draw(req: &DrawRequest<'_>, cache: Option<&CoveringCache>) -> Result<String, CliError> {
    if req.level_cap > MAX_LEVEL {
        return Err(CliError::Invalid(format!("level cap {} exceeds {MAX_LEVEL}", req.level_cap)));
    }
    if req.level > req.level_cap {
        return Err(CliError::Invalid(format!("level {} exceeds the cap {}", req.level, req.level_cap)));
    }
    let precision = req.precision.unwrap_or(req.level + 2);
    if precision < req.level {
        return Err(CliError::Invalid(format!("precision {precision} is below the level {}", req.level)));
    }
    if req.viewport.is_some() && req.format != Format::Svg {
        return Err(CliError::Invalid("--viewport applies to svg output only".into()));
    }
    let mut builder = SetBuilder::new();
    let e = SetExpr::parse(req.set)?;
    let set = builder.build(&e)?;
    if req.format == Format::Svg && set.dimension() != 2 {
        return Err(CliError::Invalid(format!("svg needs a planar set, got dimension {}", set.dimension())));
    }
    let key = format!("{}|precision={precision}", builder.key(&e)?);
    let rec = match cache.and_then(|c| c.load(&key, req.level)) {
        Some(rec) => rec,
        None => {
            let rec = export_covering(&set, req.level, precision);
            if let Some(c) = cache {
                // the cache is an optimization; failing to fill it is not an error
                let _ = c.store(&key, &rec);
            }
            rec
        }
    };
    Ok(match req.format {
        Format::Json => render::to_json(&rec),
        Format::Csv => render::to_csv(&rec),
        Format::Svg => render::to_svg(&rec, &req.viewport.clone().unwrap_or_default()),
    })
}

pub fn real(expr: &str, prec: u32) -> Result<String, CliError> {
    let x = RealExpr::parse(expr)?.eval()?;
    Ok(x.to_decimal(prec))
}

pub fn hausdorff(a: &str, b: &str, prec: u32) -> Result<String, CliError> {
    let mut builder = SetBuilder::new();
    let a = builder.build(&SetExpr::parse(a)?)?;
    let b = builder.build(&SetExpr::parse(b)?)?;
    Ok(hausdorff_tb(&a, &b)?.to_decimal(prec))
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let (text, out) = match &cli.command {
        Command::Draw {
            set,
            level,
            format,
            out,
            viewport,
            precision,
            level_cap,
        } => {
            let req = DrawRequest {
                set,
                level: *level,
                format: *format,
                viewport: viewport.clone(),
                precision: *precision,
                level_cap: *level_cap,
            };
            (draw(&req, CoveringCache::from_env().as_ref())?, out.as_deref())
        }
        Command::Real { expr, prec } => (real(expr, *prec)? + "\n", None),
        Command::Hausdorff { a, b, prec } => (hausdorff(a, b, *prec)? + "\n", None),
    };
    match out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run(args: impl IntoIterator<Item = OsString>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    set_effort_ceiling(cli.effort_ceiling);
    // effort exhaustion is reported below, not as a crash
    let default_hook = panic::take_hook();
    panic::set_hook(Box::new(move |info| {
        if info.payload().downcast_ref::<EffortExhausted>().is_none() {
            default_hook(info);
        }
    }));
    match panic::catch_unwind(AssertUnwindSafe(|| execute(&cli))) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(payload) => match payload.downcast_ref::<EffortExhausted>() {
            Some(ex) => {
                eprintln!("error: {ex}; raise --effort-ceiling to allow more work");
                3
            }
            None => panic::resume_unwind(payload),
        },
    }
}
