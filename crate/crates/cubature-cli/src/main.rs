//! Batch front end over the cubature library.
//!
//! Every subcommand loads its inputs, runs one library operation, and
//! prints a key-value report on stdout. Wall time goes to stderr so a
//! rerun with identical inputs and seeds produces byte-identical stdout
//! in exact mode. `--json FILE` additionally writes the report as a
//! machine-readable document. Subcommands that produce a point set write
//! it with `--out FILE`; `--out -` streams the point set itself to
//! stdout and moves the report to stderr.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input
//! error, 3 budget exceeded. The CUBATURE_BUDGET environment variable
//! caps the work budget of the heavy operations.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cubature::pointsets::{self, AnyPointSet};
use cubature::verify::{self, StrengthReport};
use cubature::{acceptance, constructions, lattices, markov, modforms, search};
use cubature::{CubatureError, Result};

#[derive(Parser)]
#[command(
    name = "cubature",
    version,
    about = "Construct, verify, reduce, and search cubature formulas and lattice designs",
    after_help = "Exit codes: 0 success, 1 verification failure, 2 usage or input error, \
                  3 budget exceeded.\nThe CUBATURE_BUDGET environment variable caps the work \
                  budget of heavy operations."
)]
struct Cli {
    /// Arithmetic mode for loaded point sets: exact keeps rational data
    /// exact (float input is rejected), float converts everything
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Residual tolerance (verification default 1e-9, search default 1e-12)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for every randomized routine
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Also write the run report as a JSON document
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    /// Pair sums of the kernel polynomials
    Kernel,
    /// Monomial moments against the sphere integrals
    Moments,
    /// Run both and require agreement
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the design strength of a point-set file
    Verify {
        /// Point-set file to verify
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Largest degree scanned
        #[arg(long)]
        kmax: usize,
        /// Strength criterion to run
        #[arg(long, value_enum, default_value_t = RuleArg::Kernel)]
        criterion: RuleArg,
        /// Fail (exit 1) unless the verified strength equals this value
        #[arg(long)]
        expect_strength: Option<usize>,
        /// Also report the inner-product root-set diagnostic
        #[arg(long)]
        roots: bool,
    },

    /// Emit a catalog point set by name
    Construct {
        /// Catalog name, e.g. icosahedron, polygon(7), e8_two_shell_s7
        name: Option<String>,
        /// List the catalog names and exit
        #[arg(long)]
        list: bool,
        /// Write the point set to FILE (- for stdout)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Re-verify the catalog metadata before emitting
        #[arg(long)]
        check: bool,
    },

    /// Cut a cubature formula down to at most dim(space) points
    Reduce {
        /// Point-set file to reduce
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Target space: F:k (all degrees <= k) or P:k (homogeneous degree k)
        #[arg(long)]
        space: String,
        /// Write the reduced set to FILE (- for stdout)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Minimize the kernel potential to find an N-point strength-k design
    Search {
        /// Ambient dimension
        #[arg(long)]
        n: usize,
        /// Target strength
        #[arg(long)]
        k: usize,
        /// Number of points
        #[arg(long = "N")]
        npoints: usize,
        /// Seeded random restarts
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Write the found set to FILE (- for stdout)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Shells, design strength, Voronoi tests, and neighbor steps on standard lattices
    Lattice {
        #[command(subcommand)]
        op: LatticeCmd,
    },

    /// Scan a coefficient sequence of a modular form for zeros
    ThetaScan {
        /// Sequence name: tau, mu, nu, or kappa
        #[arg(long)]
        sequence: String,
        /// Rank parameter for kappa (8 or 16)
        #[arg(long)]
        n: Option<usize>,
        /// Scan indices 1..=MAX
        #[arg(long, value_name = "MAX")]
        max: usize,
    },

    /// Spectra, homothety checks, and word statistics of reflection sets
    Markov {
        #[command(subcommand)]
        op: MarkovCmd,
    },

    /// Norm-embedding rows of a cubature formula and the round trip back
    Embed {
        /// Point-set file to embed
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Exactness parameter l (the embedding preserves degree-2l moments)
        #[arg(long)]
        l: usize,
        /// Random pairs used to estimate the isometry defect
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },

    /// Run the full acceptance ledger and print a claim-by-claim table
    Reproduce,
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Size of the norm-m shell
    Shell {
        /// Lattice name: Zn(n), Dn(n), Witt(n), E8
        #[arg(long)]
        name: String,
        /// Shell norm
        #[arg(long)]
        m: i64,
    },
    /// Design strength of the normalized norm-m shell
    Strength {
        /// Lattice name: Zn(n), Dn(n), Witt(n), E8
        #[arg(long)]
        name: String,
        /// Shell norm
        #[arg(long)]
        m: i64,
        /// Largest degree scanned
        #[arg(long)]
        kmax: usize,
    },
    /// Perfection, eutaxy, strong perfection, and extremeness
    Voronoi {
        /// Lattice name: Zn(n), Dn(n), Witt(n), E8
        #[arg(long)]
        name: String,
    },
    /// Even unimodular neighbor M^z (z as whitespace-separated numerators)
    Neighbor {
        /// Lattice name: Zn(n), Dn(n), Witt(n), E8
        #[arg(long)]
        name: String,
        /// Numerators of z over the lattice denominator, e.g. "1 1 1 1"
        #[arg(long)]
        z: String,
    },
}

#[derive(Subcommand)]
enum MarkovCmd {
    /// Eigenvalues of the weighted degree-k average of the reflections
    Spectrum {
        #[command(flatten)]
        src: MatSource,
        /// Harmonic degree
        #[arg(long)]
        k: usize,
    },
    /// Whether the reflection average acts as 1/(2l+1) on degree-l harmonics
    Check {
        /// Point-set file on the 2-sphere
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Harmonic degree
        #[arg(long)]
        l: usize,
    },
    /// Identity-word frequencies against closed-form trace moments
    Moments {
        #[command(flatten)]
        src: MatSource,
        /// Longest word length enumerated
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        /// Largest harmonic degree in the trace ladder
        #[arg(long, default_value_t = 200)]
        kmax: usize,
    },
}

#[derive(Args)]
struct MatSource {
    /// Point-set file; generators are the reflections fixing each point's
    /// orthogonal complement, weighted by the point weights
    #[arg(long, value_name = "FILE", conflicts_with = "matrices")]
    points: Option<PathBuf>,
    /// Text file of 3x3 matrices, nine numbers per block (# comments allowed),
    /// uniform weights
    #[arg(long, value_name = "FILE")]
    matrices: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Report plumbing
// ---------------------------------------------------------------------------

enum Line {
    Kv(String, String),
    Raw(String),
}

/// Accumulated run report: command echo, input digests, arithmetic mode,
/// and an ordered key-value tree. Printed after the command finishes,
/// successful or not; wall time goes to stderr to keep stdout byte-stable
/// across reruns in exact mode.
#[derive(Default)]
struct Report {
    mode: Option<String>,
    inputs: Vec<(String, String)>,
    lines: Vec<Line>,
    /// Point-set text that claims stdout (`--out -`); the report then
    /// moves to stderr.
    artifact: Option<String>,
}

impl Report {
    fn kv(&mut self, key: &str, value: impl Display) {
        self.lines.push(Line::Kv(key.into(), value.to_string()));
    }

    fn raw(&mut self, line: impl Into<String>) {
        self.lines.push(Line::Raw(line.into()));
    }

    fn set_mode(&mut self, mode: &str) {
        self.mode = Some(mode.into());
    }

    fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push((path.display().to_string(), fnv1a64(bytes)));
    }

    fn body(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", command_echo()));
        for (path, digest) in &self.inputs {
            out.push_str(&format!("input: {path} fnv1a64={digest}\n"));
        }
        if let Some(mode) = &self.mode {
            out.push_str(&format!("mode={mode}\n"));
        }
        for line in &self.lines {
            match line {
                Line::Kv(k, v) => out.push_str(&format!("{k}={v}\n")),
                Line::Raw(s) => {
                    out.push_str(s);
                    out.push('\n');
                }
            }
        }
        out
    }

    fn print(&self) {
        match &self.artifact {
            Some(text) => {
                print!("{text}");
                eprint!("{}", self.body());
            }
            None => print!("{}", self.body()),
        }
    }

    fn write_json(&self, path: &Path, code: u8, wall_ms: u128, error: Option<&str>) -> Result<()> {
        let results: Vec<serde_json::Value> = self
            .lines
            .iter()
            .map(|l| match l {
                Line::Kv(k, v) => serde_json::json!([k, v]),
                Line::Raw(s) => serde_json::json!(["", s]),
            })
            .collect();
        let inputs: Vec<serde_json::Value> = self
            .inputs
            .iter()
            .map(|(p, d)| serde_json::json!({ "path": p, "digest": d }))
            .collect();
        let doc = serde_json::json!({
            "command": command_echo(),
            "inputs": inputs,
            "mode": self.mode,
            "results": results,
            "exit": code,
            "wall_millis": wall_ms as u64,
            "error": error,
        });
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CubatureError::InvalidInput(format!("report serialization: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn command_echo() -> String {
    let mut args = std::env::args();
    let prog = args
        .next()
        .map(|p| {
            Path::new(&p)
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or(p)
        })
        .unwrap_or_else(|| "cubature".into());
    std::iter::once(prog).chain(args).collect::<Vec<_>>().join(" ")
}

fn fnv1a64(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn yesno(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn read_set(path: &Path, rep: &mut Report) -> Result<AnyPointSet> {
    let text = std::fs::read_to_string(path)?;
    rep.input(path, text.as_bytes());
    pointsets::parse_pointset(&text)
}

fn coerce(ps: AnyPointSet, mode: Option<ModeArg>) -> Result<AnyPointSet> {
    match (mode, ps) {
        (None, ps) | (Some(ModeArg::Exact), ps @ AnyPointSet::Exact(_)) => Ok(ps),
        (Some(ModeArg::Float), ps) => Ok(AnyPointSet::Float(ps.to_float())),
        (Some(ModeArg::Exact), AnyPointSet::Float(_)) => Err(CubatureError::InvalidInput(
            "cannot promote float data to exact mode".into(),
        )),
    }
}

fn emit_set(ps: &AnyPointSet, out: &Option<PathBuf>, rep: &mut Report) -> Result<()> {
    match out {
        None => {}
        Some(p) if p.as_os_str() == "-" => rep.artifact = Some(pointsets::format_pointset(ps)),
        Some(p) => {
            pointsets::save(ps, p)?;
            rep.kv("written", p.display());
        }
    }
    Ok(())
}

fn moments_any(ps: &AnyPointSet, k_max: usize, tol: f64) -> Result<StrengthReport> {
    match ps {
        AnyPointSet::Exact(p) => verify::strength_moments(p, k_max, tol),
        AnyPointSet::Float(p) => verify::strength_moments(p, k_max, tol),
    }
}

fn push_strength(rep: &mut Report, r: &StrengthReport) {
    rep.raw(format!("strength={} tight={}", r.max_strength, yesno(r.tight)));
    rep.kv(
        "criterion",
        match r.criterion {
            verify::Criterion::Kernel => "kernel",
            verify::Criterion::Moments => "moments",
        },
    );
    rep.kv("capped", yesno(r.capped));
    for (j, res) in &r.residuals {
        rep.kv(&format!("residual_{j}"), format!("{res:.3e}"));
    }
}

fn float_list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.12}")).collect();
    format!("[{}]", parts.join(", "))
}

fn parse_int_vector(text: &str) -> Result<Vec<i64>> {
    let vals: Vec<i64> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| CubatureError::Parse(format!("bad integer '{t}' in vector")))
        })
        .collect::<Result<_>>()?;
    if vals.is_empty() {
        return Err(CubatureError::Parse("empty vector".into()));
    }
    Ok(vals)
}

fn parse_matrices(text: &str) -> Result<Vec<markov::Mat3>> {
    let mut vals: Vec<f64> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| CubatureError::Parse(format!("bad matrix entry '{tok}'")))?;
            if !v.is_finite() {
                return Err(CubatureError::Parse(format!("non-finite matrix entry '{tok}'")));
            }
            vals.push(v);
        }
    }
    if vals.is_empty() || vals.len() % 9 != 0 {
        return Err(CubatureError::Parse(
            "matrix file must hold 3x3 blocks, nine numbers each".into(),
        ));
    }
    Ok(vals
        .chunks(9)
        .map(|c| [[c[0], c[1], c[2]], [c[3], c[4], c[5]], [c[6], c[7], c[8]]])
        .collect())
}

/// Generators and weights for the Markov verbs: reflections of a point
/// set (carrying its weights) or raw matrices with uniform weights.
fn load_generators(
    src: &MatSource,
    mode: Option<ModeArg>,
    rep: &mut Report,
) -> Result<(Vec<markov::Mat3>, Vec<f64>)> {
    match (&src.points, &src.matrices) {
        (Some(path), None) => {
            let ps = coerce(read_set(path, rep)?, mode)?.to_float();
            let mats = markov::reflections_of_points(&ps)?;
            let total: f64 = ps.weights().iter().sum();
            let w: Vec<f64> = ps.weights().iter().map(|v| v / total).collect();
            rep.kv("generators", mats.len());
            Ok((mats, w))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            rep.input(path, text.as_bytes());
            let mats = parse_matrices(&text)?;
            let w = vec![1.0 / mats.len() as f64; mats.len()];
            rep.kv("generators", mats.len());
            Ok((mats, w))
        }
        _ => Err(CubatureError::InvalidInput(
            "give exactly one of --points or --matrices".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_verify(
    cli: &Cli,
    rep: &mut Report,
    input: &Path,
    kmax: usize,
    criterion: RuleArg,
    expect_strength: Option<usize>,
    roots: bool,
) -> Result<()> {
    let ps = coerce(read_set(input, rep)?, cli.mode)?;
    rep.set_mode(ps.mode());
    rep.kv("points", ps.len());
    rep.kv("dim", ps.dim());
    let tol = cli.tol.unwrap_or(verify::DEFAULT_TOL);
    let report = match criterion {
        RuleArg::Kernel => verify::strength_kernel(&ps, kmax, tol)?,
        RuleArg::Moments => moments_any(&ps, kmax, tol)?,
        RuleArg::Both => {
            let a = verify::strength_kernel(&ps, kmax, tol)?;
            let b = moments_any(&ps, kmax, tol)?;
            if a.max_strength != b.max_strength {
                return Err(CubatureError::VerificationFailed(format!(
                    "criteria disagree: kernel says {}, moments say {}",
                    a.max_strength, b.max_strength
                )));
            }
            rep.kv("criteria_agree", "yes");
            a
        }
    };
    push_strength(rep, &report);
    if roots {
        let root_report = match &ps {
            AnyPointSet::Exact(p) => verify::root_set_check(p, report.max_strength)?,
            AnyPointSet::Float(p) => verify::root_set_check(p, report.max_strength)?,
        };
        match &root_report.skipped {
            Some(reason) => rep.kv("roots_skipped", reason),
            None => {
                rep.kv("roots_side", if root_report.uses_b_set { "B" } else { "A" });
                rep.kv("roots_observed", float_list(&root_report.observed));
                rep.kv("roots_expected", float_list(&root_report.expected_roots));
                rep.kv("roots_matched", yesno(root_report.matched));
                rep.kv("roots_contained", yesno(root_report.contained));
                rep.kv("roots_max_deviation", format!("{:.3e}", root_report.max_deviation));
            }
        }
    }
    if let Some(expected) = expect_strength {
        if report.max_strength != expected {
            return Err(CubatureError::VerificationFailed(format!(
                "strength {} != expected {expected}",
                report.max_strength
            )));
        }
        rep.kv("expected_strength", "met");
    }
    Ok(())
}

fn cmd_construct(
    cli: &Cli,
    rep: &mut Report,
    name: Option<&str>,
    list: bool,
    out: &Option<PathBuf>,
    check: bool,
) -> Result<()> {
    if list {
        for n in constructions::CATALOG_NAMES {
            rep.raw(*n);
        }
        return Ok(());
    }
    let name = name.ok_or_else(|| {
        CubatureError::InvalidInput("give a catalog name or --list".into())
    })?;
    let entry = constructions::catalog(name)?;
    rep.set_mode(entry.set.mode());
    rep.kv("name", &entry.name);
    rep.kv("points", entry.set.len());
    rep.kv("dim", entry.set.dim());
    if let Some(s) = entry.expected_strength {
        rep.kv("strength", s);
        rep.kv("tight", yesno(entry.expected_tight));
    }
    if let Some(d) = entry.covers_even_degree {
        rep.kv("covers_even_degree", d);
    }
    if check {
        match constructions::verify_catalog_entry(&entry)? {
            Some(v) => {
                rep.kv("verified_strength", v.max_strength);
                rep.kv("verified_tight", yesno(v.tight));
            }
            None => rep.kv("verified", "even-degree identity holds exactly"),
        }
    }
    let _ = cli;
    emit_set(&entry.set, out, rep)
}

fn cmd_reduce(
    cli: &Cli,
    rep: &mut Report,
    input: &Path,
    space: &str,
    out: &Option<PathBuf>,
) -> Result<()> {
    let ps = coerce(read_set(input, rep)?, cli.mode)?;
    rep.set_mode(ps.mode());
    let space = search::TargetSpace::parse(space)?;
    let (reduced, trace) = search::caratheodory_reduce_any(&ps, space)?;
    rep.kv("space_dim", trace.space_dim);
    rep.kv("initial_points", trace.initial_size);
    rep.kv("final_points", trace.final_size);
    rep.kv("dropped", trace.dropped.len());
    let max_null = trace.null_residuals.iter().copied().fold(0.0f64, f64::max);
    let max_drift = trace.moment_drift.iter().copied().fold(0.0f64, f64::max);
    rep.kv("max_null_residual", format!("{max_null:.3e}"));
    rep.kv("max_moment_drift", format!("{max_drift:.3e}"));
    emit_set(&reduced, out, rep)
}

fn cmd_search(
    cli: &Cli,
    rep: &mut Report,
    n: usize,
    k: usize,
    npoints: usize,
    restarts: usize,
    out: &Option<PathBuf>,
) -> Result<()> {
    let tol = cli.tol.unwrap_or(1e-12);
    rep.set_mode("float");
    rep.kv("n", n);
    rep.kv("k", k);
    rep.kv("N", npoints);
    rep.kv("restarts", restarts);
    rep.kv("seed", cli.seed);
    let outcome = search::potential_minimize(n, k, npoints, restarts, tol, cli.seed)?;
    rep.kv("residual", format!("{:.3e}", outcome.residual));
    match outcome.point_set {
        Some(ps) => {
            if let Some(v) = &outcome.verified {
                push_strength(rep, v);
            }
            emit_set(&AnyPointSet::Float(ps), out, rep)
        }
        None => Err(CubatureError::NonConvergence(format!(
            "no strength-{k} configuration found, best residual {:.3e}",
            outcome.residual
        ))),
    }
}

fn cmd_lattice(cli: &Cli, rep: &mut Report, op: &LatticeCmd) -> Result<()> {
    rep.set_mode("exact");
    match op {
        LatticeCmd::Shell { name, m } => {
            let lat = lattices::standard(name)?;
            let shell = lat.shell(*m)?;
            rep.kv("lattice", name);
            rep.kv("rank", lat.rank());
            rep.kv("m", m);
            rep.kv("shell_size", shell.len());
        }
        LatticeCmd::Strength { name, m, kmax } => {
            let lat = lattices::standard(name)?;
            let shell = lat.shell(*m)?;
            rep.kv("lattice", name);
            rep.kv("rank", lat.rank());
            rep.kv("m", m);
            rep.kv("shell_size", shell.len());
            let report = lattices::shell_design_strength(&lat, *m, *kmax)?;
            push_strength(rep, &report);
        }
        LatticeCmd::Voronoi { name } => {
            let lat = lattices::standard(name)?;
            let v = lattices::voronoi_tests(&lat)?;
            rep.kv("lattice", name);
            rep.kv("rank", lat.rank());
            rep.kv("min_norm", v.min_norm);
            rep.kv("short_shell_size", v.short_shell_size);
            rep.kv("perfect", yesno(v.perfect));
            rep.kv("eutactic", yesno(v.eutactic));
            rep.kv("strongly_perfect", yesno(v.strongly_perfect));
            rep.kv("extreme", yesno(v.extreme));
        }
        LatticeCmd::Neighbor { name, z } => {
            let lat = lattices::standard(name)?;
            let znum = parse_int_vector(z)?;
            let out = lattices::neighbor(&lat, &znum)?;
            rep.kv("lattice", name);
            rep.kv("neighbor", out.name());
            rep.kv("rank", out.rank());
            rep.kv("even", yesno(out.is_even()));
            rep.kv("unimodular", yesno(out.is_unimodular()));
            rep.kv("unit_vectors", out.shell(1)?.len());
            rep.kv("roots", out.shell(2)?.len());
            rep.raw("gram:");
            rep.raw(out.gram_text().trim_end().to_string());
        }
    }
    let _ = cli;
    Ok(())
}

fn cmd_theta_scan(rep: &mut Report, sequence: &str, n: Option<usize>, max: usize) -> Result<()> {
    let seq = modforms::ScanSequence::parse(sequence, n)?;
    rep.set_mode("exact");
    match n {
        Some(rank) => rep.kv("sequence", format!("{sequence}[{rank}]")),
        None => rep.kv("sequence", sequence),
    }
    rep.kv("max", max);
    match modforms::nonvanishing_scan(seq, max)? {
        None => rep.raw("zeros: none"),
        Some(m) => rep.raw(format!("zeros: first at m={m}")),
    }
    Ok(())
}

fn cmd_markov(cli: &Cli, rep: &mut Report, op: &MarkovCmd) -> Result<()> {
    rep.set_mode("float");
    match op {
        MarkovCmd::Spectrum { src, k } => {
            let (mats, weights) = load_generators(src, cli.mode, rep)?;
            let op = markov::markov_operator(&mats, &weights, *k)?;
            let sp = markov::spectrum(&op);
            rep.kv("k", k);
            rep.kv("dim", op.dim());
            rep.kv("symmetric", yesno(op.symmetric));
            rep.kv("symmetrized", yesno(sp.symmetrized));
            rep.kv("trace", format!("{:.12}", op.trace()));
            let mut eig = sp.eigenvalues.clone();
            eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
            rep.kv("eigenvalues", float_list(&eig));
        }
        MarkovCmd::Check { input, l } => {
            let ps = coerce(read_set(input, rep)?, cli.mode)?.to_float();
            let report = markov::cubature_homothety_check(&ps, *l)?;
            rep.kv("degree", report.degree);
            rep.kv("factor", format!("{:.12}", report.factor));
            rep.kv("max_deviation", format!("{:.3e}", report.max_deviation));
            rep.kv("homothety", yesno(report.is_homothety));
            if !report.is_homothety {
                return Err(CubatureError::VerificationFailed(format!(
                    "reflection average is not the scalar 1/(2l+1) at degree {l}: \
                     deviation {:.3e}",
                    report.max_deviation
                )));
            }
        }
        MarkovCmd::Moments { src, nmax, kmax } => {
            let (mats, _) = load_generators(src, cli.mode, rep)?;
            let report = markov::kesten_moments(&mats, *nmax, *kmax)?;
            rep.kv("set_size", report.set_size);
            rep.kv("exact_words", yesno(report.exact));
            rep.kv("kesten_bound", format!("{:.12}", report.kesten_bound));
            if let Some(pb) = report.pair_bound {
                rep.kv("pair_bound", format!("{pb:.12}"));
            }
            let top = report.ks.len() - 1;
            rep.kv("trace_degree", report.ks[top]);
            for n in 0..=report.n_max {
                let m = report.m[n];
                let t = report.trace_table[n][top];
                rep.raw(format!(
                    "N={n} identity_words={} m={m:.9} trace_moment={t:.9} diff={:.3e}",
                    report.identity_counts[n],
                    (m - t).abs()
                ));
            }
        }
    }
    Ok(())
}

fn cmd_embed(cli: &Cli, rep: &mut Report, input: &Path, l: usize, trials: usize) -> Result<()> {
    let ps = coerce(read_set(input, rep)?, cli.mode)?.to_float();
    rep.set_mode("float");
    let rows = verify::embed_to_banach(&ps, l)?;
    rep.kv("l", l);
    rep.kv("rows", rows.len());
    rep.kv("cols", rows.first().map_or(0, Vec::len));
    let err = verify::banach_isometry_error(&rows, l, trials, cli.seed);
    rep.kv("trials", trials);
    rep.kv("isometry_error", format!("{err:.3e}"));
    let back = verify::banach_to_cubature(&rows, l)?;
    rep.kv("roundtrip_points", back.len());
    let tol = cli.tol.unwrap_or(verify::DEFAULT_TOL);
    if err > tol {
        return Err(CubatureError::VerificationFailed(format!(
            "isometry defect {err:.3e} exceeds tolerance {tol:.3e}"
        )));
    }
    Ok(())
}

fn cmd_reproduce(rep: &mut Report) -> Result<()> {
    let outcomes = acceptance::all();
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    for o in &outcomes {
        let status = if o.pass { "PASS" } else { "FAIL" };
        rep.raw(format!(
            "criterion {:>2}  {:<width$}  {status}  {:>7} ms",
            o.id, o.name, o.millis
        ));
        rep.raw(format!("              {}", o.details.replace('\n', " | ")));
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    rep.raw(format!("summary: {passed}/{} pass", outcomes.len()));
    if passed != outcomes.len() {
        return Err(CubatureError::VerificationFailed(format!(
            "{} of {} acceptance criteria failed",
            outcomes.len() - passed,
            outcomes.len()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn run(cli: &Cli, rep: &mut Report) -> Result<()> {
    match &cli.cmd {
        Cmd::Verify { input, kmax, criterion, expect_strength, roots } => {
            cmd_verify(cli, rep, input, *kmax, *criterion, *expect_strength, *roots)
        }
        Cmd::Construct { name, list, out, check } => {
            cmd_construct(cli, rep, name.as_deref(), *list, out, *check)
        }
        Cmd::Reduce { input, space, out } => cmd_reduce(cli, rep, input, space, out),
        Cmd::Search { n, k, npoints, restarts, out } => {
            cmd_search(cli, rep, *n, *k, *npoints, *restarts, out)
        }
        Cmd::Lattice { op } => cmd_lattice(cli, rep, op),
        Cmd::ThetaScan { sequence, n, max } => cmd_theta_scan(rep, sequence, *n, *max),
        Cmd::Markov { op } => cmd_markov(cli, rep, op),
        Cmd::Embed { input, l, trials } => cmd_embed(cli, rep, input, *l, *trials),
        Cmd::Reproduce => cmd_reproduce(rep),
    }
}

fn exit_code(e: &CubatureError) -> u8 {
    match e {
        CubatureError::VerificationFailed(_) | CubatureError::NonConvergence(_) => 1,
        CubatureError::Budget(_) => 3,
        CubatureError::InvalidInput(_) | CubatureError::Parse(_) | CubatureError::Io(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let mut rep = Report::default();
    let result = run(&cli, &mut rep);
    let wall_ms = started.elapsed().as_millis();
    let mut code = match &result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e)
        }
    };
    rep.print();
    eprintln!("wall_ms={wall_ms}");
    if let Some(path) = &cli.json {
        let err_text = result.as_ref().err().map(ToString::to_string);
        if let Err(e) = rep.write_json(path, code, wall_ms, err_text.as_deref()) {
            eprintln!("error: {e}");
            if code == 0 {
                code = 2;
            }
        }
    }
    ExitCode::from(code)
}
