//! The `goldman` command line: argument parsing and the five subcommands.
//! The binary is a thin wrapper around [`run`].

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::angles::{self, AngleReport};
use crate::error::{Error, Result};
use crate::goldman::{self, goldman_bracket, lift_path, stabilize, term_count, DEFAULT_RADIUS_CAP};
use crate::group::{conj_class, cyclic_reduce, Word};
use crate::surface::{self, MetricSampler, SampleKind, SurfaceKind, SurfaceRep};
use crate::svg;
use crate::tol::Tolerances;
use crate::twist::{self, Drift, Grid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY_FAIL: i32 = 5;

/// Environment variable holding comma-separated `key=value` tolerance overrides.
pub const TOL_ENV: &str = "GOLDMAN_TOL";

#[derive(Parser, Debug)]
#[command(name = "goldman", version, about = "Goldman brackets, intersection angles and twist flows on hyperbolic surfaces")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a surface and write it as JSON.
    Surface(SurfaceCmd),
    /// Bracket of two classes with per-crossing angles, as JSON.
    Bracket(BracketCmd),
    /// Check equal-term/equal-angle and term-count/intersection-number claims.
    Verify(VerifyCmd),
    /// Sweep the twist along the distinguished curve and check monotonicity.
    Twist(TwistCmd),
    /// Draw the lift of a loop product through one crossing.
    Svg(SvgCmd),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Pants,
    HoledTorus,
}

#[derive(Args, Debug)]
struct Inline {
    /// Surface type.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Boundary lengths (pants, three values) or the simple curve length (holed torus).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    length: Vec<f64>,
    /// Twist along the simple curve (holed torus).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    twist: f64,
    /// Length of the dual curve at zero twist (holed torus).
    #[arg(long)]
    dual_length: Option<f64>,
}

impl Inline {
    fn build(&self) -> Result<SurfaceRep> {
        match self.kind {
            None => Err(Error::InvalidInput("give --surface FILE or --kind with --length".into())),
            Some(KindArg::Pants) => {
                let [l1, l2, l3] = self.length[..] else {
                    return Err(Error::InvalidInput("pants need --length l1,l2,l3".into()));
                };
                if self.twist != 0.0 || self.dual_length.is_some() {
                    return Err(Error::InvalidInput("--twist and --dual-length apply to holed tori only".into()));
                }
                surface::pants(l1, l2, l3)
            }
            Some(KindArg::HoledTorus) => {
                let [l] = self.length[..] else {
                    return Err(Error::InvalidInput("a holed torus needs one --length".into()));
                };
                match self.dual_length {
                    Some(d) => surface::holed_torus_with_dual(l, self.twist, d),
                    None => surface::holed_torus(l, self.twist),
                }
            }
        }
    }
}

#[derive(Args, Debug)]
struct Source {
    /// Surface JSON file written by `goldman surface`.
    #[arg(long, conflicts_with = "kind")]
    surface: Option<PathBuf>,
    #[command(flatten)]
    inline: Inline,
}

impl Source {
    fn load(&self) -> Result<SurfaceRep> {
        match &self.surface {
            Some(path) => SurfaceRep::from_json(&fs::read_to_string(path)?),
            None => self.inline.build(),
        }
    }
}

#[derive(Args, Debug)]
struct SurfaceCmd {
    #[command(flatten)]
    inline: Inline,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BracketCmd {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    x: Word,
    #[arg(long)]
    y: Word,
    #[arg(long, default_value_t = DEFAULT_RADIUS_CAP)]
    radius_cap: usize,
    /// Fail when two branches of y cross x at the same point.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyCmd {
    #[command(flatten)]
    source: Source,
    /// Sample metrics from this seed instead of using one fixed surface.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled metrics.
    #[arg(long, default_value_t = 5)]
    metrics: usize,
    #[arg(long)]
    x: Word,
    /// One or more second words.
    #[arg(long, value_delimiter = ',', required = true)]
    y: Vec<Word>,
    #[arg(long, default_value_t = DEFAULT_RADIUS_CAP)]
    radius_cap: usize,
    /// Angle equality tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TwistCmd {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    y: Word,
    /// `start:stop:step`.
    #[arg(long, default_value = "-2:2:0.05", allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = DEFAULT_RADIUS_CAP)]
    radius_cap: usize,
    /// Also compare dℓ_y/ds with Σ cos φ.
    #[arg(long)]
    crosscheck: bool,
    /// CSV file; the CSV goes to stdout and verdicts to stderr when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SvgCmd {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    x: Word,
    #[arg(long)]
    y: Word,
    /// Index into the sorted crossing records.
    #[arg(long, default_value_t = 0)]
    record: usize,
    /// Arcs drawn on each side of the crossing.
    #[arg(long, default_value_t = 3)]
    arcs: usize,
    #[arg(long, default_value_t = DEFAULT_RADIUS_CAP)]
    radius_cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs, and returns the exit code.
/// Tolerance overrides are read from [`TOL_ENV`].
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let tol = match std::env::var(TOL_ENV) {
        Ok(overrides) => match Tolerances::DEFAULT.with_overrides(&overrides) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(err, "error: {TOL_ENV}: {e}");
                return EXIT_USAGE;
            }
        },
        Err(_) => Tolerances::DEFAULT,
    };
    run_with(args, tol, out, err)
}

pub fn run_with<I, T>(args: I, tol: Tolerances, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Surface(c) => cmd_surface(c, out),
        Command::Bracket(c) => cmd_bracket(c, out),
        Command::Verify(c) => cmd_verify(c, tol, out),
        Command::Twist(c) => cmd_twist(c, tol, out, err),
        Command::Svg(c) => cmd_svg(c, out),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_surface(c: &SurfaceCmd, out: &mut dyn Write) -> Result<bool> {
    let rep = c.inline.build()?;
    emit(c.out.as_deref(), &rep.to_json(), out)?;
    Ok(true)
}

#[derive(Serialize)]
struct RecordJson {
    g: String,
    param: f64,
    sign: i8,
    term_class: String,
    theta: f64,
    phi: f64,
}

#[derive(Serialize)]
struct TermJson {
    class: String,
    coeff: i64,
}

#[derive(Serialize)]
struct BracketJson {
    x: String,
    y: String,
    radius_used: usize,
    records: Vec<RecordJson>,
    sum: Vec<TermJson>,
    i: usize,
    terms_with_multiplicity: u64,
    shortcut: bool,
    coincident_crossings: usize,
}

fn cores(x: &Word, y: &Word) -> (Word, Word) {
    (cyclic_reduce(x).0, cyclic_reduce(y).0)
}

fn cmd_bracket(c: &BracketCmd, out: &mut dyn Write) -> Result<bool> {
    let rep = c.source.load()?;
    let bs = goldman_bracket(&rep, &c.x, &c.y, c.radius_cap)?;
    let (x, y) = cores(&c.x, &c.y);
    if c.strict && bs.coincident_crossings > 0 {
        stabilize(&rep, &x, &y, c.radius_cap)?.require_general_position()?;
    }
    let records = bs
        .records
        .iter()
        .map(|r| {
            Ok(RecordJson {
                g: r.conjugator.to_string(),
                param: r.param,
                sign: r.sign,
                term_class: r.term_class.to_string(),
                theta: angles::theta(&rep, &x, &y, r)?,
                phi: angles::phi(&rep, &x, &y, r)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = BracketJson {
        x: c.x.to_string(),
        y: c.y.to_string(),
        radius_used: bs.radius_used,
        i: bs.records.len(),
        terms_with_multiplicity: term_count(&bs),
        sum: bs.terms.iter().map(|(k, v)| TermJson { class: k.to_string(), coeff: *v }).collect(),
        records,
        shortcut: bs.shortcut,
        coincident_crossings: bs.coincident_crossings,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    emit(c.out.as_deref(), &text, out)?;
    Ok(true)
}

/// Whether `x` is known to be a simple closed curve on this surface: a
/// generator, or the third boundary class of a pair of pants.
fn known_simple(rep: &SurfaceRep, x: &Word) -> bool {
    let (core, _) = cyclic_reduce(x);
    if core.len() == 1 {
        return true;
    }
    let third: Word = "ab".parse().expect("literal word");
    matches!(rep.kind(), SurfaceKind::Pants { .. })
        && (conj_class(&core) == conj_class(&third) || conj_class(&core) == conj_class(&third.inverse()))
}

fn verdict(line: &mut String, ok: bool, text: std::fmt::Arguments<'_>) -> bool {
    line.push_str(if ok { "PASS " } else { "FAIL " });
    line.push_str(&text.to_string());
    line.push('\n');
    ok
}

fn cmd_verify(c: &VerifyCmd, tol: Tolerances, out: &mut dyn Write) -> Result<bool> {
    if c.metrics == 0 {
        return Err(Error::InvalidInput("--metrics must be at least 1".into()));
    }
    let angle_tol = c.tol.unwrap_or(tol.angle_equality);
    let reps: Vec<(String, SurfaceRep)> = match c.seed {
        Some(seed) => {
            if c.source.surface.is_some() {
                return Err(Error::InvalidInput("--seed and --surface are exclusive".into()));
            }
            let kind = match c.source.inline.kind {
                Some(KindArg::Pants) => SampleKind::Pants,
                Some(KindArg::HoledTorus) | None => SampleKind::HoledTorus,
            };
            let sampler = MetricSampler::new(seed, kind);
            (0..c.metrics).map(|i| (format!("seed{seed}/{i}"), sampler.sample(i))).collect()
        }
        None => vec![("surface".to_string(), c.source.load()?)],
    };
    let mut text = String::new();
    let mut all = true;
    for y in &c.y {
        let reports: Vec<AngleReport> = angles::equal_term_report(&reps, &c.x, y, c.radius_cap)?;
        let (dev, worst) = reports
            .iter()
            .map(|r| (r.max_group_deviation(), r.metric_id.as_str()))
            .fold((0.0, "-"), |a, b| if b.0 > a.0 { b } else { a });
        let groups: usize = reports.iter().map(|r| r.groups.iter().filter(|g| g.members.len() > 1).count()).sum();
        all &= verdict(
            &mut text,
            dev <= angle_tol,
            format_args!("equal-term-angles x={} y={y} metrics={} shared-groups={groups} max-deviation={dev:e} at {worst}", c.x, reps.len()),
        );
        let hits = angles::contrapositive_probe(&reports, tol.contrapositive);
        all &= verdict(&mut text, hits.is_empty(), format_args!("contrapositive-probe x={} y={y} hits={}", c.x, hits.len()));
        let case = reports.iter().map(AngleReport::max_case_residual).fold(0.0, f64::max);
        all &= verdict(&mut text, case <= tol.angle, format_args!("case-relations x={} y={y} max-residual={case:e}", c.x));
        let coh = reports.iter().map(AngleReport::max_coherence_residual).fold(0.0, f64::max);
        all &= verdict(&mut text, coh <= angle_tol, format_args!("cosine-rule x={} y={y} max-residual={coh:e}", c.x));
        if known_simple(&reps[0].1, &c.x) {
            for (id, rep) in &reps {
                let bs = goldman_bracket(rep, &c.x, y, c.radius_cap)?;
                let terms = term_count(&bs);
                let i = goldman::geometric_intersection_number(rep, &c.x, y, c.radius_cap)?;
                all &= verdict(
                    &mut text,
                    terms == i as u64,
                    format_args!("terms-equal-intersections x={} y={y} metric={id} terms={terms} i={i}", c.x),
                );
            }
        }
    }
    emit(c.out.as_deref(), &text, out)?;
    Ok(all)
}

fn cmd_twist(c: &TwistCmd, tol: Tolerances, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let grid: Grid = c.grid.parse()?;
    if grid.len() < 3 {
        return Err(Error::InvalidInput(format!("grid {} has {} point(s); need at least 3", c.grid, grid.len())));
    }
    let rep = c.source.load()?;
    let sw = twist::sweep(&rep, &c.y, &grid, c.radius_cap)?;
    let mut csv = Vec::new();
    sw.write_csv(&mut csv)?;

    let mut text = String::new();
    let mut all = true;
    for v in twist::monotonicity_check(&sw)? {
        let ok = v.pass && v.worst_step <= -tol.monotone_step;
        all &= verdict(&mut text, ok, format_args!("phi-decreasing record={} worst-step={:e}", v.record_id, v.worst_step));
    }
    for v in twist::theta_trend_check(&sw)? {
        let ok = v.pass && v.worst_step <= -tol.monotone_step;
        all &= verdict(&mut text, ok, format_args!("theta-trend record={} worst-step={:e}", v.record_id, v.worst_step));
    }
    let pts = grid.points();
    let (lo, mid, hi) = (pts[0], pts[pts.len() / 2], pts[pts.len() - 1]);
    let drift = twist::uniform_drift(&sw, &[(lo, hi), (lo, mid), (mid, hi)])?;
    let drift_name = match drift {
        Drift::Anticlockwise => "anticlockwise",
        Drift::Clockwise => "clockwise",
        Drift::Mixed => "mixed",
        Drift::None => "none",
    };
    let uniform = matches!(drift, Drift::Anticlockwise | Drift::Clockwise) || sw.records.is_empty();
    all &= verdict(&mut text, uniform, format_args!("endpoint-drift direction={drift_name}"));
    if c.crosscheck {
        for row in twist::wolpert_crosscheck(&sw)? {
            let soft = if row.residual <= twist::WOLPERT_SOFT_THRESHOLD { "ok" } else { "above-soft-threshold" };
            text.push_str(&format!(
                "INFO crosscheck s={} derivative={} sum-cos-phi={} residual={:e} {soft}\n",
                row.s, row.derivative, row.sum_cos_phi, row.residual
            ));
        }
    }
    match &c.out {
        Some(path) => {
            fs::write(path, &csv)?;
            out.write_all(text.as_bytes())?;
        }
        None => {
            out.write_all(&csv)?;
            err.write_all(text.as_bytes())?;
        }
    }
    Ok(all)
}

fn cmd_svg(c: &SvgCmd, out: &mut dyn Write) -> Result<bool> {
    let rep = c.source.load()?;
    let (x, y) = cores(&c.x, &c.y);
    let records = stabilize(&rep, &x, &y, c.radius_cap)?.records;
    let record = records.get(c.record).ok_or_else(|| {
        Error::InvalidInput(format!("record {} out of range; {} crossing(s)", c.record, records.len()))
    })?;
    let path = lift_path(&rep, &x, &y, record, c.arcs)?;
    let text = svg::render_lift(&rep, &x, &path)?;
    emit(c.out.as_deref(), &text, out)?;
    Ok(true)
}
