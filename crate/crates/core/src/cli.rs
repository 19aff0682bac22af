//! Command-line interface. [`run`] is the whole program minus process I/O,
//! so it can be driven from tests.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::braid::{parse_braid, BraidWord};
use crate::complex::FrobeniusSpec;
use crate::cube::{build_cube, check_size, DEFAULT_LIMIT};
use crate::error::{Error, Result};
use crate::experiments::{conjecture1_scan, conjecture2_check, random_braids, separate_pair};
use crate::export::{export_json, parse_json};
use crate::invariants::{
    graded_euler, kh_poincare, representatives_in_grading, sl2_decompose, spectral_annular_kh, Differential,
    Representatives, Sl2Decomposition, SpectralOutput,
};
use crate::poly::{LaurentPoly3, Style, Var};
use crate::reduce::spectral_page;

/// Environment variable overriding the default crossing limit.
pub const ENV_MAX_CROSSINGS: &str = "ANNKH_MAX_CROSSINGS";
/// Environment variable naming a directory for cached results.
pub const ENV_CACHE_DIR: &str = "ANNKH_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "annkh",
    version,
    about = "Triply graded annular Khovanov homology of braid closures"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Report sizes and timings on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,

    /// Maximum number of crossings (default 20, or $ANNKH_MAX_CROSSINGS).
    #[arg(long, global = true)]
    limit: Option<usize>,

    /// Polynomial rendering.
    #[arg(long, global = true, value_enum, default_value_t = StyleArg::Paper)]
    style: StyleArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StyleArg {
    /// Compact `1/q^3+1/q+...` form.
    Paper,
    /// Ascending `(t, q, z)` order with spaced signs.
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DifferentialArg {
    Full,
    Annular,
}

impl From<DifferentialArg> for Differential {
    fn from(d: DifferentialArg) -> Self {
        match d {
            DifferentialArg::Full => Differential::Full,
            DifferentialArg::Annular => Differential::Annular,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FrobeniusArg {
    Khovanov,
    Lee,
}

#[derive(Args, Debug)]
struct BraidArg {
    /// Braid as "S:g1,g2,...", "BR[S,{g1,...}]" or a table name (3_1, 4_1, 8_12a, 8_12b).
    #[arg(allow_hyphen_values = true)]
    braid: String,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Poincare polynomial of Khovanov homology.
    Kh {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, value_enum, default_value_t = DifferentialArg::Full)]
        differential: DifferentialArg,
        #[arg(long, value_enum, default_value_t = FrobeniusArg::Khovanov)]
        frobenius: FrobeniusArg,
        /// Keep the annular grading as the variable z.
        #[arg(long)]
        z: bool,
    },
    /// Sutured annular homology (shorthand for `kh --differential annular`).
    Annular {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long)]
        z: bool,
    },
    /// sl2 decomposition of the annular homology.
    Sl2 {
        #[command(flatten)]
        braid: BraidArg,
    },
    /// The spectral invariant: W_0 as the coefficient of E, W_k of C[k].
    Spectral {
        #[command(flatten)]
        braid: BraidArg,
        /// Print the dimensions of page E_j of the spectral sequence instead.
        #[arg(long)]
        page: Option<u32>,
    },
    /// Resolutions of the cube with their cycles.
    Cube {
        #[command(flatten)]
        braid: BraidArg,
    },
    /// Chain basis and homology representatives in one (i, j) grading.
    Reps {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, allow_negative_numbers = true)]
        i: i32,
        #[arg(long, allow_negative_numbers = true)]
        j: i32,
        #[arg(long, value_enum, default_value_t = DifferentialArg::Full)]
        differential: DifferentialArg,
    },
    /// Append stabilizations with the given signs.
    Stabilize {
        #[command(flatten)]
        braid: BraidArg,
        /// Comma-separated signs, e.g. -1,1.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        signs: Vec<i64>,
    },
    /// Graded Euler characteristic from the cube state sum.
    Euler {
        #[command(flatten)]
        braid: BraidArg,
    },
    /// Conjecture harnesses and the pair separation experiment.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Stabilized unknots: dim W_0 against z^(-sum e) (q z + 1/(q z)).
    Conjecture1 {
        #[arg(long, default_value_t = 6)]
        max_length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Vanishing of W_k for k >= 2, on the table braids and random braids.
    Conjecture2 {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        max_strands: usize,
        #[arg(long, default_value_t = 8)]
        max_length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the spectral invariants of two braids.
    Separate {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
}

/// Process environment relevant to the program.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub max_crossings: Option<String>,
    pub cache_dir: Option<PathBuf>,
}

impl Env {
    pub fn from_process() -> Self {
        Env {
            max_crossings: std::env::var(ENV_MAX_CROSSINGS).ok(),
            cache_dir: std::env::var_os(ENV_CACHE_DIR).map(PathBuf::from),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Context<'a> {
    json: bool,
    verbose: bool,
    limit: usize,
    style: Style,
    cache_dir: Option<&'a Path>,
    log: Vec<String>,
}

impl Context<'_> {
    fn note(&mut self, msg: impl Into<String>) {
        if self.verbose {
            self.log.push(msg.into());
        }
    }

    /// Computes `f`, or reads a previous result from the cache directory.
    fn cached<T: Serialize + DeserializeOwned>(&mut self, key: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let Some(dir) = self.cache_dir else {
            return f();
        };
        let path = dir.join(format!("{}.json", hex::encode(Sha256::digest(key.as_bytes()))));
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(v) = parse_json(&text) {
                self.note(format!("cache hit: {}", path.display()));
                return Ok(v);
            }
        }
        let v = f()?;
        let written = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, export_json(&v)));
        match written {
            Ok(()) => self.note(format!("cached: {}", path.display())),
            Err(e) => self.note(format!("cache write failed: {e}")),
        }
        Ok(v)
    }
}

fn resolve_limit(flag: Option<usize>, env: &Env) -> Result<usize> {
    if let Some(l) = flag {
        return Ok(l);
    }
    match &env.max_crossings {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("{ENV_MAX_CROSSINGS} must be a nonnegative integer, got {v:?}"))),
        None => Ok(DEFAULT_LIMIT),
    }
}

/// Runs one command line (`args` includes the program name).
pub fn run<I, T>(args: I, env: &Env) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let limit = match resolve_limit(cli.limit, env) {
        Ok(l) => l,
        Err(e) => return failure(e, Vec::new()),
    };
    let mut ctx = Context {
        json: cli.json,
        verbose: cli.verbose,
        limit,
        style: match cli.style {
            StyleArg::Paper => Style::Paper,
            StyleArg::Text => Style::Text,
        },
        cache_dir: env.cache_dir.as_deref(),
        log: Vec::new(),
    };
    let started = Instant::now();
    let result = dispatch(&cli.verb, &mut ctx);
    ctx.note(format!("elapsed: {:.3} s", started.elapsed().as_secs_f64()));
    match result {
        Ok(mut stdout) => {
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            Output {
                code: 0,
                stdout,
                stderr: join_lines(&ctx.log),
            }
        }
        Err(e) => failure(e, ctx.log),
    }
}

fn failure(e: Error, mut log: Vec<String>) -> Output {
    log.push(format!("error: {e}"));
    Output {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: join_lines(&log),
    }
}

fn join_lines(lines: &[String]) -> String {
    lines.iter().map(|l| format!("{l}\n")).collect()
}

fn braid(arg: &BraidArg) -> Result<BraidWord> {
    parse_braid(&arg.braid)
}

fn poly_output(ctx: &Context, p: &LaurentPoly3) -> String {
    if ctx.json {
        export_json(p)
    } else {
        p.format(ctx.style)
    }
}

fn dispatch(verb: &Verb, ctx: &mut Context) -> Result<String> {
    match verb {
        Verb::Kh {
            braid: b,
            differential,
            frobenius,
            z,
        } => kh(ctx, &braid(b)?, (*differential).into(), *frobenius, *z),
        Verb::Annular { braid: b, z } => kh(ctx, &braid(b)?, Differential::Annular, FrobeniusArg::Khovanov, *z),
        Verb::Sl2 { braid: b } => {
            let b = braid(b)?;
            let limit = ctx.limit;
            check_size(&b, limit)?;
            let s: Sl2Decomposition = ctx.cached(&format!("sl2 {}", b.inline()), || sl2_decompose(&b, limit))?;
            ctx.note(format!("total dimension: {}", s.total_dimension()));
            Ok(if ctx.json { export_json(&s) } else { s.format() })
        }
        Verb::Spectral { braid: b, page } => {
            let b = braid(b)?;
            let limit = ctx.limit;
            check_size(&b, limit)?;
            let out: SpectralOutput =
                ctx.cached(&format!("spectral {}", b.inline()), || spectral_annular_kh(&b, limit))?;
            ctx.note(format!(
                "W0 dimension: {}, staircases: {}, annular spread: {}",
                out.decomposition.w0.len(),
                out.decomposition.staircases.len(),
                out.annular_spread()
            ));
            match page {
                Some(j) => {
                    let dims = spectral_page(&out.decomposition, *j);
                    Ok(if ctx.json {
                        export_json(&dims)
                    } else {
                        dims.to_poly().format(ctx.style)
                    })
                }
                None => Ok(if ctx.json {
                    export_json(&out)
                } else {
                    out.format(ctx.style)
                }),
            }
        }
        Verb::Cube { braid: b } => cube(ctx, &braid(b)?),
        Verb::Reps {
            braid: b,
            i,
            j,
            differential,
        } => {
            let r = representatives_in_grading(&braid(b)?, *i, *j, (*differential).into(), ctx.limit)?;
            Ok(if ctx.json { export_json(&r) } else { reps_text(&r) })
        }
        Verb::Stabilize { braid: b, signs } => {
            let s = braid(b)?.stabilize(signs)?;
            Ok(if ctx.json { export_json(&s) } else { s.to_string() })
        }
        Verb::Euler { braid: b } => {
            let p = graded_euler(&braid(b)?, ctx.limit)?;
            Ok(poly_output(ctx, &p))
        }
        Verb::Experiment { which } => experiment(ctx, which),
    }
}

fn kh(ctx: &mut Context, b: &BraidWord, d: Differential, frob: FrobeniusArg, keep_z: bool) -> Result<String> {
    let spec = match frob {
        FrobeniusArg::Khovanov => FrobeniusSpec::khovanov(),
        FrobeniusArg::Lee => FrobeniusSpec::lee(),
    };
    let key = format!("kh {} {:?} {}", b.inline(), d, spec.name);
    let limit = ctx.limit;
    check_size(b, limit)?;
    let p: LaurentPoly3 = ctx.cached(&key, || kh_poincare(b, &spec, d, limit))?;
    ctx.note(format!("total rank: {}", p.total()));
    let p = if keep_z { p } else { p.forget_variable(Var::Z) };
    Ok(poly_output(ctx, &p))
}

#[derive(Serialize)]
struct CubeVertex {
    vertex: String,
    i: i32,
    cycles: Vec<String>,
}

fn cube(ctx: &mut Context, b: &BraidWord) -> Result<String> {
    let cube = build_cube(b, ctx.limit)?;
    ctx.note(format!("{} vertices, {} edges", cube.diagrams.len(), cube.edges.len()));
    let nm = b.crossing_counts().negative as i32;
    let vertices: Vec<CubeVertex> = cube
        .diagrams
        .iter()
        .map(|d| CubeVertex {
            vertex: d.vertex.to_string(),
            i: d.vertex.weight() as i32 - nm,
            cycles: d.cycles.iter().map(|c| c.to_string()).collect(),
        })
        .collect();
    if ctx.json {
        return Ok(export_json(&vertices));
    }
    Ok(vertices
        .iter()
        .map(|v| format!("{} i={} {}", v.vertex, v.i, v.cycles.join(" ")))
        .collect::<Vec<_>>()
        .join("\n"))
}

fn reps_text(r: &Representatives) -> String {
    let mut lines = vec![format!("basis ({} vectors):", r.basis.len())];
    lines.extend(r.basis.iter().enumerate().map(|(n, v)| format!("  [{n}] {v}")));
    lines.push(format!("classes: {}", r.vectors.len()));
    for v in &r.vectors {
        let entries: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
        lines.push(format!("  ({})", entries.join(", ")));
    }
    lines.join("\n")
}

fn experiment(ctx: &mut Context, which: &Experiment) -> Result<String> {
    let report = match which {
        Experiment::Conjecture1 { max_length, seed } => conjecture1_scan(*max_length, *seed, ctx.limit)?,
        Experiment::Conjecture2 {
            samples,
            max_strands,
            max_length,
            seed,
        } => {
            if *max_length > ctx.limit {
                return Err(Error::SizeLimit {
                    crossings: *max_length,
                    limit: ctx.limit,
                });
            }
            let mut braids: Vec<BraidWord> = ["3_1", "4_1", "8_12a", "8_12b"]
                .iter()
                .filter_map(|n| BraidWord::named(n))
                .filter(|b| b.len() <= ctx.limit)
                .collect();
            braids.extend(random_braids(*samples, *max_strands, *max_length, *seed));
            conjecture2_check(&braids, *seed, ctx.limit)
        }
        Experiment::Separate { a, b } => {
            let cmp = separate_pair(&parse_braid(a)?, &parse_braid(b)?, ctx.limit)?;
            return Ok(if ctx.json { export_json(&cmp) } else { cmp.report() });
        }
    };
    ctx.note(report.summary());
    Ok(if ctx.json { export_json(&report) } else { report.table() })
}
