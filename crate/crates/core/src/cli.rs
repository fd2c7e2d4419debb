//! Command implementations behind the `purichaos` binary.
//!
//! Exit codes: 0 on success, 1 on I/O or computation failure, 2 on invalid
//! options, 3 when a self-check fails.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::basin::{self, BasinLabel, GridSpec};
use crate::complexdyn;
use crate::error::{Error, Result};
use crate::fano::{self, CycleSearch, StabilityReport};
use crate::protocol::{self, LocalUnitary};
use crate::qstate::{self, state_from_zeta, werner_mix, DensityMatrix2Q, RiemannPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

pub const ORACLE_TOL: f64 = 1e-10;
pub const ORACLE_PROBABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "purichaos", version, about = "Dynamics of an iterated two-qubit purification protocol")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the protocol from ρ(ζ, λ) and dump per-step records as JSON.
    Iterate(IterateArgs),
    /// Compute a basin-of-attraction grid and write PPM/CSV files.
    Basin(BasinArgs),
    /// Search for cycles of the mixed-state dynamics and report their stability.
    Cycles(CyclesArgs),
    /// Print the real-line basin constants and their residuals.
    Constants(OutArgs),
    /// Compare the selection formula with the explicit two-pair circuit.
    OracleCheck(OracleArgs),
    /// Classify random points in a small disk to expose sensitive dependence.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    /// Initial parameter, e.g. `0.5+0.2i` or `inf`.
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: RiemannPoint,
    /// Werner weight of the pure state; 1 iterates the pure state itself.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BasinArgs {
    /// `re_min,re_max,im_min,im_max`.
    #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
    pub viewport: String,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Defaults to 200 for λ = 1 and 400 otherwise.
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, default_value_t = basin::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out_ppm: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Majority label over a 2×2 sub-grid per cell.
    #[arg(long)]
    pub supersample: bool,
    /// Also print a box-counting estimate of the boundary dimension.
    #[arg(long)]
    pub dimension: bool,
}

#[derive(Debug, Args)]
pub struct CyclesArgs {
    /// Seed noise levels, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = CycleSearch::default().lambdas)]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = CycleSearch::default().max_period)]
    pub max_period: usize,
    /// ζ seeds per noise level.
    #[arg(long, default_value_t = CycleSearch::default().seeds_per_lambda)]
    pub seeds: usize,
    #[arg(long, default_value_t = CycleSearch::default().tol)]
    pub tol: f64,
    #[arg(long, default_value_t = CycleSearch::default().max_iters)]
    pub max_iters: usize,
    /// Also analyse 𝟙/4 and the pure cycles on the fixed points of f.
    #[arg(long)]
    pub include_unstable: bool,
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub center: RiemannPoint,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. } | Error::Parse { .. } | Error::InvalidState(_) => EXIT_USAGE,
        _ => EXIT_IO,
    }
}

pub fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Iterate(a) => cmd_iterate(a, stdout),
        Command::Basin(a) => cmd_basin(a, stdout),
        Command::Cycles(a) => cmd_cycles(a, stdout),
        Command::Constants(a) => emit_json(&constants_report(), a.out.as_deref(), stdout),
        Command::OracleCheck(a) => cmd_oracle_check(a, stdout),
        Command::Probe(a) => cmd_probe(a, stdout),
    }
}

/// Pretty JSON in which every float carries 17 significant digits.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let bytes = to_json(value)?;
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => stdout.write_all(&bytes)?,
    }
    Ok(EXIT_OK)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(0) => Err(Error::param("threads", "must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter {
                name: "threads",
                reason: e.to_string(),
            })?
            .install(f),
    }
}

#[derive(Debug, Serialize)]
pub struct RecordJson {
    pub step: usize,
    /// `amplitudes` (re/im pairs of the four amplitudes) or `fano` (16 coordinates).
    pub representation: &'static str,
    pub state: Vec<f64>,
    pub entropy: f64,
    pub purity: f64,
    pub success_probability: f64,
    pub cumulative_yield: f64,
}

pub fn iterate_records(zeta: RiemannPoint, lambda: f64, steps: usize) -> Result<Vec<RecordJson>> {
    qstate::check_lambda(lambda)?;
    let u = LocalUnitary::hadamard();
    if lambda >= 1.0 {
        let traj = protocol::run_trajectory(&state_from_zeta(zeta), &u, steps)?;
        Ok(traj
            .records
            .into_iter()
            .map(|r| RecordJson {
                step: r.step,
                representation: "amplitudes",
                state: r.state.amplitudes().iter().flat_map(|c| [c.re, c.im]).collect(),
                entropy: r.entropy,
                purity: r.purity,
                success_probability: r.success_probability,
                cumulative_yield: r.cumulative_yield,
            })
            .collect())
    } else {
        let traj = protocol::run_trajectory(&werner_mix(zeta, lambda)?, &u, steps)?;
        Ok(traj
            .records
            .into_iter()
            .map(|r| RecordJson {
                step: r.step,
                representation: "fano",
                state: fano::to_fano(&r.state).0.to_vec(),
                entropy: r.entropy,
                purity: r.purity,
                success_probability: r.success_probability,
                cumulative_yield: r.cumulative_yield,
            })
            .collect())
    }
}

fn cmd_iterate(a: &IterateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let records = iterate_records(a.zeta, a.lambda, a.steps)?;
    emit_json(&records, a.out.out.as_deref(), stdout)
}

pub fn basin_spec(a: &BasinArgs) -> Result<GridSpec> {
    let [re_min, re_max, im_min, im_max] = basin::parse_viewport(&a.viewport)?;
    let spec = GridSpec {
        re_min,
        re_max,
        im_min,
        im_max,
        width: a.width,
        height: a.height,
        lambda: a.lambda,
        max_iters: a.max_iters.unwrap_or_else(|| basin::default_max_iters(a.lambda)),
        tol: a.tol,
        supersample: a.supersample,
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_basin(a: &BasinArgs, stdout: &mut dyn Write) -> Result<i32> {
    let spec = basin_spec(a)?;
    let grid = basin::compute_basin_with_threads(&spec, a.threads)?;
    if let Some(p) = &a.out_ppm {
        std::fs::write(p, basin::render_ppm(&grid))?;
    }
    if let Some(p) = &a.out_csv {
        grid.write_csv(std::fs::File::create(p)?)?;
    }
    writeln!(stdout, "{}", grid.counts())?;
    if grid.maximally_mixed > 0 {
        writeln!(stdout, "maximally_mixed={}", grid.maximally_mixed)?;
    }
    if a.dimension {
        match basin::boundary_dimension(&grid) {
            Ok(d) => writeln!(stdout, "boundary_dimension={:.4} r2={:.4}", d.dimension, d.r2)?,
            Err(Error::DegenerateGrid) => writeln!(stdout, "boundary_dimension=none")?,
            Err(e) => return Err(e),
        }
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
pub struct MemberJson {
    pub fano: Vec<f64>,
    pub diagonal: [f64; 4],
    pub purity: f64,
    pub entropy: f64,
}

/// Comparison of a cycle through `½(|00⟩⟨00|+|11⟩⟨11|)` with the tabulated partner state.
#[derive(Debug, Serialize)]
pub struct ReferenceJson {
    pub distance_to_correlated_mixture: f64,
    pub partner_distance_to_tabulated: f64,
    pub partner_diagonal_deviation: f64,
    /// Largest deviation on the `|01⟩, |10⟩` block.
    pub partner_middle_block_deviation: f64,
    /// Real part of the partner's `⟨00|ρ|11⟩`; the tabulated state has 0 there.
    pub partner_coherence_00_11: f64,
}

#[derive(Debug, Serialize)]
pub struct CycleJson {
    pub period: usize,
    pub label: &'static str,
    pub stable: bool,
    pub spectral_radius: f64,
    pub eigenvalue_magnitudes: Vec<f64>,
    pub members: Vec<MemberJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceJson>,
}

#[derive(Debug, Serialize)]
pub struct SeedJson {
    pub re: f64,
    pub im: f64,
    pub lambda: f64,
}

#[derive(Debug, Serialize)]
pub struct CyclesJson {
    pub lambdas: Vec<f64>,
    pub seeds_per_lambda: usize,
    pub max_period: usize,
    pub stable_mixed_cycles: usize,
    pub cycles: Vec<CycleJson>,
    pub unresolved_seeds: Vec<SeedJson>,
}

pub fn cycle_kind(report: &StabilityReport) -> &'static str {
    let mm = DensityMatrix2Q::maximally_mixed();
    if report.period == 1 && qstate::trace_distance(&report.cycle[0], &mm) < 1e-9 {
        return "maximally_mixed";
    }
    match basin::cycle_label(&report.cycle) {
        Some(BasinLabel::Bell) => "bell",
        Some(BasinLabel::SeparableCycle) => "separable",
        Some(BasinLabel::MixedCycle) if report.is_pure() => "pure_other",
        Some(BasinLabel::MixedCycle) => "mixed",
        _ => "other",
    }
}

pub fn reference_diagnostics(report: &StabilityReport) -> Option<ReferenceJson> {
    let rho1 = fano::correlated_mixture();
    let k = report
        .cycle
        .iter()
        .position(|m| qstate::trace_distance(m, &rho1) < 1e-6)?;
    if report.period != 2 {
        return None;
    }
    let partner = &report.cycle[(k + 1) % 2];
    let tab = fano::tabulated_partner();
    let diag = (0..4)
        .map(|i| (partner.diagonal()[i] - tab.diagonal()[i]).abs())
        .fold(0.0, f64::max);
    let middle = [(1, 1), (1, 2), (2, 1), (2, 2)]
        .iter()
        .map(|&(i, j)| (partner.entry(i, j) - tab.entry(i, j)).norm())
        .fold(0.0, f64::max);
    Some(ReferenceJson {
        distance_to_correlated_mixture: qstate::trace_distance(&report.cycle[k], &rho1),
        partner_distance_to_tabulated: qstate::trace_distance(partner, &tab),
        partner_diagonal_deviation: diag,
        partner_middle_block_deviation: middle,
        partner_coherence_00_11: partner.entry(0, 3).re,
    })
}

pub fn cycles_report(search: &CycleSearch) -> Result<CyclesJson> {
    let outcome = fano::find_mixed_cycles(search)?;
    let cycles: Vec<CycleJson> = outcome
        .cycles
        .iter()
        .map(|r| CycleJson {
            period: r.period,
            label: cycle_kind(r),
            stable: r.stable,
            spectral_radius: r.spectral_radius(),
            eigenvalue_magnitudes: r.eigenvalue_magnitudes.clone(),
            members: r
                .cycle
                .iter()
                .map(|m| MemberJson {
                    fano: fano::to_fano(m).0.to_vec(),
                    diagonal: m.diagonal(),
                    purity: qstate::purity(m),
                    entropy: qstate::reduced_entropy(m),
                })
                .collect(),
            reference: reference_diagnostics(r),
        })
        .collect();
    Ok(CyclesJson {
        lambdas: search.lambdas.clone(),
        seeds_per_lambda: search.seeds_per_lambda,
        max_period: search.max_period,
        stable_mixed_cycles: cycles.iter().filter(|c| c.stable && !c.members.iter().all(|m| (m.purity - 1.0).abs() < 1e-8)).count(),
        cycles,
        unresolved_seeds: outcome
            .unresolved
            .iter()
            .map(|s| {
                let z = s.zeta.finite().unwrap_or_default();
                SeedJson {
                    re: z.re,
                    im: z.im,
                    lambda: s.lambda,
                }
            })
            .collect(),
    })
}

fn cmd_cycles(a: &CyclesArgs, stdout: &mut dyn Write) -> Result<i32> {
    let search = CycleSearch {
        lambdas: a.lambda.clone(),
        seeds_per_lambda: a.seeds,
        max_period: a.max_period,
        tol: a.tol,
        max_iters: a.max_iters,
        include_unstable: a.include_unstable,
        ..Default::default()
    };
    let report = with_threads(a.threads, || cycles_report(&search))?;
    emit_json(&report, a.out.out.as_deref(), stdout)
}

#[derive(Debug, Serialize)]
pub struct ResidualsJson {
    /// `|ζ_A³ + ζ_A² + ζ_A - 1|`.
    pub zeta_a_cubic: f64,
    /// `|f(ζ_B) + ζ_A|`.
    pub f_zeta_b_plus_zeta_a: f64,
    pub zeta_a_times_zeta_b_minus_one: f64,
    /// `|ζ_C⁴ + 2ζ_C - 1|`.
    pub zeta_c_quartic: f64,
}

#[derive(Debug, Serialize)]
pub struct ConstantsJson {
    pub a: f64,
    #[serde(rename = "zeta_A")]
    pub zeta_a: f64,
    #[serde(rename = "zeta_B")]
    pub zeta_b: f64,
    #[serde(rename = "zeta_C")]
    pub zeta_c: f64,
    /// `f'(ζ_A)`; its modulus exceeds 1, so `ζ_A` repels.
    pub derivative_at_zeta_a: f64,
    pub residuals: ResidualsJson,
}

pub fn constants_report() -> ConstantsJson {
    let c = complexdyn::compute_constants();
    let fb = complexdyn::eval_f(RiemannPoint::real(c.zeta_b))
        .finite()
        .map_or(f64::INFINITY, |z| (z.re + c.zeta_a).hypot(z.im));
    let dfa = complexdyn::derivative_f(RiemannPoint::real(c.zeta_a))
        .map_or(f64::NAN, |d| d.re);
    let za = c.zeta_a;
    ConstantsJson {
        a: c.a,
        zeta_a: za,
        zeta_b: c.zeta_b,
        zeta_c: c.zeta_c,
        derivative_at_zeta_a: dfa,
        residuals: ResidualsJson {
            zeta_a_cubic: (za * za * za + za * za + za - 1.0).abs(),
            f_zeta_b_plus_zeta_a: fb,
            zeta_a_times_zeta_b_minus_one: (za * c.zeta_b - 1.0).abs(),
            zeta_c_quartic: (c.zeta_c.powi(4) + 2.0 * c.zeta_c - 1.0).abs(),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSummary {
    pub samples: usize,
    pub max_deviation: f64,
    pub max_probability_deviation: f64,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.max_deviation < ORACLE_TOL && self.max_probability_deviation < ORACLE_PROBABILITY_TOL
    }
}

/// Runs the selection formula and the circuit on `samples` seeded random
/// states: the first half pure, the rest mixed.
pub fn oracle_check(samples: usize, seed: u64) -> Result<OracleSummary> {
    if samples == 0 {
        return Err(Error::param("samples", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = OracleSummary {
        samples,
        max_deviation: 0.0,
        max_probability_deviation: 0.0,
    };
    for k in 0..samples {
        let rho = if k < samples / 2 {
            qstate::random_pure_state(&mut rng).density()
        } else {
            qstate::random_density_matrix(&mut rng)
        };
        let fast = protocol::selection_step_mixed(&rho)?;
        let slow = protocol::circuit_oracle(&rho)?;
        summary.max_deviation = summary.max_deviation.max(fast.state.max_entry_deviation(&slow.state));
        summary.max_probability_deviation = summary
            .max_probability_deviation
            .max((fast.success_probability - slow.success_probability).abs());
    }
    Ok(summary)
}

fn cmd_oracle_check(a: &OracleArgs, stdout: &mut dyn Write) -> Result<i32> {
    let s = oracle_check(a.samples, a.seed)?;
    let verdict = if s.passed() { "PASS" } else { "FAIL" };
    writeln!(
        stdout,
        "samples={} max_deviation={:.3e} max_probability_deviation={:.3e} {verdict}",
        s.samples, s.max_deviation, s.max_probability_deviation
    )?;
    Ok(if s.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_probe(a: &ProbeArgs, stdout: &mut dyn Write) -> Result<i32> {
    let report = basin::sensitivity_probe(a.center, a.radius, a.lambda, a.samples, a.seed)?;
    emit_json(&report, a.out.out.as_deref(), stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("purichaos").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn floats_carry_seventeen_digits() {
        let bytes = to_json(&vec![0.1f64, -2.5e-300, 0.0]).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.contains("-2.5000000000000000e-300"));
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![0.1, -2.5e-300, 0.0]);
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(run_capture(&["iterate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["iterate", "--zeta", "1+"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["iterate", "--zeta", "1", "--lambda", "2"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["basin", "--viewport", "1,0,0,1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn iterate_examples() {
        let recs = iterate_records(RiemannPoint::ONE, 1.0, 3).unwrap();
        assert_eq!(recs.len(), 3);
        assert!(recs.iter().all(|r| (r.entropy - 1.0).abs() < 1e-12));
        let recs = iterate_records(RiemannPoint::ZERO, 1.0, 2).unwrap();
        assert!(recs.iter().all(|r| r.entropy.abs() < 1e-12));
        assert_ne!(recs[0].state, recs[1].state);
        let recs = iterate_records(RiemannPoint::real(0.5), 0.75, 4).unwrap();
        assert_eq!(recs[0].representation, "fano");
        assert_eq!(recs[0].state.len(), 16);
    }

    #[test]
    fn constants_residuals_are_small() {
        let c = constants_report();
        assert!(c.residuals.zeta_a_cubic < 1e-12);
        assert!(c.residuals.f_zeta_b_plus_zeta_a < 1e-10);
        assert!(c.residuals.zeta_a_times_zeta_b_minus_one < 1e-10);
        assert!(c.residuals.zeta_c_quartic < 1e-9);
        assert!(c.derivative_at_zeta_a.abs() > 1.0);
    }

    #[test]
    fn oracle_check_passes_and_is_seeded() {
        let a = oracle_check(40, 3).unwrap();
        assert!(a.passed());
        assert_eq!(a, oracle_check(40, 3).unwrap());
        assert!(oracle_check(0, 3).is_err());
    }

    #[test]
    fn basin_summary_for_one_cell() {
        let (code, out, _) = run_capture(&["basin", "--viewport", "0.5,1.5,-0.5,0.5", "--width", "1", "--height", "1"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.trim(), "cells=1 bell=1 separable=0 mixed=0 unresolved=0");
    }

    #[test]
    fn io_failures_exit_with_one() {
        let (code, _, err) = run_capture(&["constants", "--out", "/nonexistent-dir/x.json"]);
        assert_eq!(code, EXIT_IO);
        assert!(err.starts_with("error:"));
    }
}
