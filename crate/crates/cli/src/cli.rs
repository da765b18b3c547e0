//! Argument definitions and command execution.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use buildings_core::conditions::{classify_pair, scan};
use buildings_core::field::DEFAULT_FIELD_CAP;
use buildings_core::homology::{fundamental_group, is_trivial_group, reduced_homology_with, HomologyOptions, DEFAULT_EFFORT};
use buildings_core::linalg::{det_ring, lift_sl_matrix, random_sl, reduce_matrix, FMatrix};
use buildings_core::ranks::{cross_validate, nu_degree, DualityParams};
use buildings_core::{ComplexKind, PrimeContext, RingElement, RingId, SimplicialComplex};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::cache::{Cache, ComplexRequest};
use crate::lifting::rng_for;
use crate::manifest::RunManifest;
use crate::suites::{run_suite, ContextSpec, SuiteConfig, SuiteName};
use crate::tables::{rank_rows, to_csv, ConditionRow};

#[derive(Debug, Parser)]
#[command(name = "buildings-lab", version, about = "Residue fields, bases complexes, Tits buildings and their homology")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Print JSON instead of text.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Print CSV where the command has a tabular form.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Cache directory; overrides BUILDINGS_LAB_CACHE.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Coset-table budget for edge-path group checks.
    #[arg(long, global = true, default_value_t = DEFAULT_EFFORT)]
    pub effort: usize,
    /// Largest number of simplices a build may produce.
    #[arg(long, global = true, default_value_t = buildings_core::builders::DEFAULT_SIMPLEX_CAP)]
    pub cap: u64,
    /// Count Unknown verdicts as failures.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads for suites (0: one per logical core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Write a run manifest to this path.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Units, generator and small primes of a ring.
    RingInfo {
        ring: String,
        #[arg(long, default_value_t = 30)]
        norm_max: i64,
    },
    /// The residue field of a prime and its unit image.
    Field {
        ring: String,
        p: String,
        /// List every element with its coset.
        #[arg(long)]
        elements: bool,
    },
    /// Build complexes into the cache.
    #[command(subcommand)]
    Complex(ComplexCommand),
    /// Reduced homology of a cached complex (cache key) or a complex file.
    Homology {
        complex: String,
        #[arg(long)]
        torsion: bool,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Edge-path group of a complex and whether it is trivial.
    Pi1 {
        complex: String,
        #[arg(long, default_value_t = 0)]
        basepoint: usize,
    },
    /// The five conditions and the classification of one prime.
    Conditions { ring: String, p: String },
    /// Classify every prime of a ring up to a norm.
    Scan {
        ring: String,
        #[arg(long)]
        norm_max: i64,
        #[arg(long, default_value_t = DEFAULT_FIELD_CAP)]
        field_cap: u64,
    },
    /// Top homology ranks of the oriented Tits building, by formula and oracle.
    Ranks {
        ring: String,
        p: String,
        #[arg(long)]
        n_max: usize,
        /// Also compute ranks by homology, within --cap.
        #[arg(long)]
        oracle: bool,
    },
    /// The top nonvanishing cohomological degree for SL_n over the ring.
    Nu { ring: String, n: u32 },
    /// Lift matrices of determinant one from the residue field to the ring.
    Lift {
        ring: String,
        p: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Rows separated by `;`, entries by spaces or commas.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Re-run the command recorded in a manifest and compare output digests.
    Rerun { manifest: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum ComplexCommand {
    /// Build B, BD, BA, BDA, BD', BDA', T or TU and store it in the cache.
    Build {
        kind: String,
        ring: String,
        p: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long)]
        max_dim: Option<usize>,
        /// Also write the complex in text form here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub q_max: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Restrict to these primes, written `ring:p`.
    #[arg(long = "ctx")]
    pub contexts: Vec<String>,
    /// JSON suite configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write `<suite>.json` and `<suite>.txt` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
    /// Files to write, relative to the command's output directory.
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl Output {
    fn text(s: String) -> Self {
        Output {
            stdout: s,
            ..Output::default()
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn ctx_of(ring: &str, p: &str, cap: u64) -> Result<PrimeContext> {
    ContextSpec {
        ring: ring.into(),
        p: p.into(),
    }
    .resolve(cap)
}

/// A cache key or a path to a complex in text form.
fn load_complex(cache: &Cache, arg: &str) -> Result<SimplicialComplex> {
    let is_key = arg.len() == 64 && arg.bytes().all(|b| b.is_ascii_hexdigit());
    if is_key {
        let blob = cache
            .get(arg)?
            .with_context(|| format!("no valid cache entry {arg} under {}", cache.dir().display()))?;
        return Ok(SimplicialComplex::from_text(&String::from_utf8_lossy(&blob))?);
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("reading complex file {arg}"))?;
    Ok(SimplicialComplex::from_text(&text)?)
}

fn parse_matrix(ctx: &PrimeContext, s: &str) -> Result<FMatrix> {
    s.split(';')
        .map(|row| {
            row.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| Ok(ctx.reduce(&RingElement::parse(ctx.ring(), t)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

fn show_ring_matrix(m: &[Vec<RingElement>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

/// Parse `args` (without the program name) and run.
pub fn run_args(args: &[String]) -> Result<Output> {
    let cli = Cli::try_parse_from(std::iter::once("buildings-lab".to_string()).chain(args.iter().cloned()))?;
    run(&cli, args)
}

pub fn run(cli: &Cli, args: &[String]) -> Result<Output> {
    let start = Instant::now();
    let g = &cli.global;
    let cache = Cache::resolve(g.cache_dir.as_deref());
    let out = execute(cli, &cache)?;
    if let Some(path) = &g.manifest {
        let mut m = RunManifest::new(command_name(&cli.command), args.to_vec());
        m.cache_dir = cache.dir().display().to_string();
        m.cache_keys = cache.touched();
        m.wall_times.insert("total".into(), start.elapsed().as_secs_f64());
        m.record_output("stdout", out.stdout.as_bytes());
        for (name, bytes) in &out.files {
            m.record_output(&name.display().to_string(), bytes);
        }
        m.write(path)?;
    }
    Ok(out)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::RingInfo { .. } => "ring-info",
        Command::Field { .. } => "field",
        Command::Complex(_) => "complex build",
        Command::Homology { .. } => "homology",
        Command::Pi1 { .. } => "pi1",
        Command::Conditions { .. } => "conditions",
        Command::Scan { .. } => "scan",
        Command::Ranks { .. } => "ranks",
        Command::Nu { .. } => "nu",
        Command::Lift { .. } => "lift",
        Command::Verify(_) => "verify",
        Command::Rerun { .. } => "rerun",
    }
}

fn execute(cli: &Cli, cache: &Cache) -> Result<Output> {
    let g = &cli.global;
    match &cli.command {
        Command::RingInfo { ring, norm_max } => ring_info(g, ring, *norm_max),
        Command::Field { ring, p, elements } => field_info(g, ring, p, *elements),
        Command::Complex(ComplexCommand::Build {
            kind,
            ring,
            p,
            n,
            m,
            max_dim,
            out,
        }) => {
            let ctx = ctx_of(ring, p, 1 << 16)?;
            let kind = ComplexKind::from_str(kind)?;
            let req = ComplexRequest::new(kind, *n, *m).max_dim(*max_dim).cap(g.cap);
            let c = cache.complex(&ctx, &req)?;
            let key = Cache::key(c.header(), "complex");
            if let Some(path) = out {
                std::fs::write(path, c.to_text()).with_context(|| format!("writing {}", path.display()))?;
            }
            let v = json!({ "key": key, "header": c.header(), "counts": c.f_vector(), "path": cache.path(&key) });
            if g.json {
                return Ok(Output::text(pretty(&v)?));
            }
            Ok(Output::text(format!("{}\nkey {key}\ncounts {:?}\n", req.label(&ctx), c.f_vector())))
        }
        Command::Homology {
            complex,
            torsion,
            max_degree,
        } => {
            let c = load_complex(cache, complex)?;
            let opts = HomologyOptions {
                max_degree: *max_degree,
                torsion: *torsion,
                modular: true,
            };
            let r = reduced_homology_with(&c, &opts)?;
            if g.json {
                return Ok(Output::text(pretty(&r)?));
            }
            let mut s = format!("counts {:?}\nreduced betti {:?}\n", r.counts, r.betti);
            if let Some(t) = &r.torsion {
                let _ = writeln!(s, "torsion {t:?}");
            }
            Ok(Output::text(s))
        }
        Command::Pi1 { complex, basepoint } => {
            let c = load_complex(cache, complex)?;
            let report = is_trivial_group(&fundamental_group(&c, *basepoint)?, g.effort)?;
            if g.json {
                return Ok(Output::text(pretty(&report)?));
            }
            Ok(Output::text(format!(
                "{}\nabelianization rank {} torsion {:?}\nafter simplification {} generators, {} relators\n",
                report.verdict,
                report.abelian_rank,
                report.abelian_torsion,
                report.simplified.generators,
                report.simplified.relators.len()
            )))
        }
        Command::Conditions { ring, p } => {
            let ctx = ctx_of(ring, p, 1 << 16)?;
            let r = classify_pair(&ctx, g.effort)?;
            if g.csv {
                return Ok(Output::text(to_csv(&[ConditionRow::from(&r)])?));
            }
            if g.json {
                return Ok(Output::text(pretty(&r)?));
            }
            let mut s = format!("{} mod {}: q = {}, |U| = {}, index {}\n", r.ring.name(), r.p, r.q, r.units, r.index);
            for (i, c) in r.conditions().iter().enumerate() {
                let _ = writeln!(s, "condition ({}): {}", i + 1, c.verdict);
            }
            let _ = writeln!(s, "sums of two units: {}", r.sum_of_two_units.verdict);
            let _ = writeln!(s, "classification: {}", r.classification);
            Ok(Output::text(s))
        }
        Command::Scan {
            ring,
            norm_max,
            field_cap,
        } => {
            let ring = RingId::from_str(ring)?;
            let mut reports = Vec::new();
            let mut skipped = Vec::new();
            for r in scan(ring, *norm_max, g.effort, *field_cap) {
                match r {
                    Ok(r) => reports.push(r),
                    Err(e) => skipped.push(e.to_string()),
                }
            }
            if g.csv {
                let rows: Vec<ConditionRow> = reports.iter().map(ConditionRow::from).collect();
                return Ok(Output::text(to_csv(&rows)?));
            }
            if g.json {
                return Ok(Output::text(pretty(&json!({ "reports": reports, "skipped": skipped }))?));
            }
            let mut s = String::new();
            for r in &reports {
                let v: Vec<String> = r.conditions().iter().map(|c| c.verdict.to_string()).collect();
                let _ = writeln!(s, "{:>10}  q {:>5}  index {:>3}  {}  {}", r.p, r.q, r.index, v.join(" "), r.classification);
            }
            for e in &skipped {
                let _ = writeln!(s, "skipped: {e}");
            }
            Ok(Output::text(s))
        }
        Command::Ranks { ring, p, n_max, oracle } => {
            if *n_max == 0 {
                bail!("--n-max must be at least 1");
            }
            let ctx = ctx_of(ring, p, 1 << 16)?;
            let t = cross_validate(&ctx, *n_max, oracle.then_some(g.cap))?;
            if g.csv {
                return Ok(Output::text(to_csv(&rank_rows(&t))?));
            }
            if g.json {
                return Ok(Output::text(pretty(&t)?));
            }
            let mut s = format!(
                "{} mod {}: q = {}, |F×/U| = {}, default reading {}\n",
                t.ring.name(),
                t.p,
                t.q,
                t.cosets,
                t.variant.name()
            );
            for e in &t.entries {
                let _ = writeln!(
                    s,
                    "t_{} = {}  (cosets {}, orbits {}, oracle {}, lower bound {})",
                    e.n,
                    e.value,
                    e.cosets,
                    e.orbits,
                    e.oracle.as_deref().unwrap_or("-"),
                    e.lower_bound
                );
            }
            Ok(Output::text(s))
        }
        Command::Nu { ring, n } => {
            let ring = RingId::from_str(ring)?;
            let v = nu_degree(DualityParams::of(ring), *n);
            if g.json {
                return Ok(Output::text(pretty(&json!({ "ring": ring, "n": n, "nu": v }))?));
            }
            Ok(Output::text(format!("{v}\n")))
        }
        Command::Lift {
            ring,
            p,
            n,
            matrix,
            count,
            seed,
        } => {
            let ctx = ctx_of(ring, p, 1 << 16)?;
            let samples: Vec<FMatrix> = match matrix {
                Some(m) => vec![parse_matrix(&ctx, m)?],
                None => {
                    let mut rng = rng_for(&ctx, *n, *seed);
                    (0..*count).map(|_| random_sl(&ctx, *n, &mut rng)).collect()
                }
            };
            let mut out = Vec::new();
            for m in &samples {
                let a = lift_sl_matrix(&ctx, m)?;
                out.push(json!({
                    "matrix": m.iter().map(|r| r.iter().map(|&x| ctx.show(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "lift": show_ring_matrix(&a),
                    "determinant": det_ring(&a).to_string(),
                    "reduces_to_matrix": reduce_matrix(&ctx, &a) == *m,
                }));
            }
            if g.json {
                return Ok(Output::text(pretty(&out)?));
            }
            let mut s = String::new();
            for v in &out {
                let _ = writeln!(s, "{} -> {} (det {})", v["matrix"], v["lift"], v["determinant"]);
            }
            Ok(Output::text(s))
        }
        Command::Verify(args) => verify(g, args, cache),
        Command::Rerun { manifest } => rerun(manifest),
    }
}

fn ring_info(g: &GlobalOpts, ring: &str, norm_max: i64) -> Result<Output> {
    let ring = RingId::from_str(ring)?;
    let units: Vec<String> = ring.units().iter().map(ToString::to_string).collect();
    let primes: Vec<String> = ring.primes_up_to_norm(norm_max).iter().map(|p| format!("{p} (norm {})", p.norm())).collect();
    let theta = ring.theta().map(|t| t.to_string());
    let v = json!({
        "ring": ring,
        "name": ring.name(),
        "generator": theta,
        "units": units,
        "minimal_norm_primes": ring.minimal_norm_primes().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "primes": primes,
        "duality": DualityParams::of(ring),
    });
    if g.json {
        return Ok(Output::text(pretty(&v)?));
    }
    Ok(Output::text(format!(
        "{}\nunits {}\nprimes up to norm {norm_max}: {}\n",
        ring.name(),
        units.join(", "),
        primes.join(", ")
    )))
}

fn field_info(g: &GlobalOpts, ring: &str, p: &str, elements: bool) -> Result<Output> {
    let ctx = ctx_of(ring, p, 1 << 16)?;
    let show = |xs: &[buildings_core::Fe]| xs.iter().map(|&x| ctx.show(x)).collect::<Vec<_>>();
    let mut v = json!({
        "ring": ctx.ring(),
        "p": ctx.p().to_string(),
        "q": ctx.q(),
        "unit_image": show(ctx.unit_image()),
        "index": ctx.coset_count(),
        "orbits": ctx.orbit_count(),
        "full_unit_image": ctx.is_full_unit_image(),
        "cosets": ctx.cosets().iter().map(|c| show(c)).collect::<Vec<_>>(),
    });
    if elements {
        v["elements"] = json!(ctx.elements().map(|x| ctx.show(x)).collect::<Vec<_>>());
    }
    if g.json {
        return Ok(Output::text(pretty(&v)?));
    }
    let mut s = format!(
        "{} mod {}: q = {}\nU = {{{}}}, |F×/U| = {}\n",
        ctx.ring().name(),
        ctx.p(),
        ctx.q(),
        show(ctx.unit_image()).join(", "),
        ctx.coset_count()
    );
    if elements {
        let _ = writeln!(s, "elements {}", ctx.elements().map(|x| ctx.show(x)).collect::<Vec<_>>().join(", "));
    }
    Ok(Output::text(s))
}

pub fn suite_config(g: &GlobalOpts, args: &VerifyArgs) -> Result<SuiteConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading suite config {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing suite config {}", path.display()))?
        }
        None => SuiteConfig::default(),
    };
    if !args.contexts.is_empty() {
        config.contexts = Some(args.contexts.iter().map(|s| ContextSpec::from_str(s)).collect::<Result<_>>()?);
    }
    config.q_max = args.q_max.or(config.q_max);
    config.n_max = args.n_max.or(config.n_max);
    config.samples = args.samples.unwrap_or(config.samples);
    config.seed = args.seed.unwrap_or(config.seed);
    if g.cap != buildings_core::builders::DEFAULT_SIMPLEX_CAP {
        config.cap = g.cap;
    }
    if g.effort != DEFAULT_EFFORT {
        config.effort = g.effort;
    }
    config.strict |= g.strict;
    if g.jobs != 0 {
        config.jobs = g.jobs;
    }
    Ok(config)
}

fn verify(g: &GlobalOpts, args: &VerifyArgs, cache: &Cache) -> Result<Output> {
    let name = SuiteName::from_str(&args.suite)?;
    let config = suite_config(g, args)?;
    let (report, _timings) = run_suite(name, &config, cache)?;
    let json = pretty(&report)?;
    let summary = report.summary();
    let mut out = Output {
        stdout: if g.json { json.clone() } else { summary.clone() },
        code: report.exit_code(),
        files: Vec::new(),
    };
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (file, bytes) in [(format!("{}.json", name.name()), json), (format!("{}.txt", name.name()), summary)] {
            let path = dir.join(&file);
            std::fs::write(&path, &bytes).with_context(|| format!("writing {}", path.display()))?;
            out.files.push((PathBuf::from(file), bytes.into_bytes()));
        }
    }
    Ok(out)
}

fn rerun(path: &Path) -> Result<Output> {
    let old = RunManifest::read(path)?;
    if old.command == "rerun" {
        bail!("manifest records a rerun");
    }
    let mut args = old.arguments.clone();
    // replace the recorded manifest path so the original is kept for comparison
    let tmp = tempfile_path(path);
    if let Some(i) = args.iter().position(|a| a == "--manifest") {
        args.remove(i);
        if i < args.len() {
            args.remove(i);
        }
    } else if let Some(i) = args.iter().position(|a| a.starts_with("--manifest=")) {
        args.remove(i);
    }
    if !args.iter().any(|a| a == "--cache-dir" || a.starts_with("--cache-dir=")) && !old.cache_dir.is_empty() {
        args.push("--cache-dir".into());
        args.push(old.cache_dir.clone());
    }
    args.push("--manifest".into());
    args.push(tmp.display().to_string());
    let out = run_args(&args)?;
    let new = RunManifest::read(&tmp)?;
    let _ = std::fs::remove_file(&tmp);
    let mismatched = old.mismatched_outputs(&new);
    let mut stdout = out.stdout;
    if mismatched.is_empty() {
        stdout.push_str("rerun: outputs identical\n");
    } else {
        stdout.push_str(&format!("rerun: outputs differ: {}\n", mismatched.join(", ")));
    }
    Ok(Output {
        stdout,
        code: if mismatched.is_empty() { out.code } else { 1 },
        files: Vec::new(),
    })
}

fn tempfile_path(near: &Path) -> PathBuf {
    let dir = near.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    dir.join(format!(".rerun-{}.json", std::process::id()))
}
