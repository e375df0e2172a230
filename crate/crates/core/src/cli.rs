//! Command-line front end. Every subcommand writes its machine output
//! (CSV or JSON, nine significant digits) into `--out` and a short human
//! summary to stdout.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::common::MassRatios;
use crate::dynamics::{
    initial_state, integrate_observed, HierarchyRegions, IntegratorConfig, Mode, Monitors, OrbitOutcome,
};
use crate::equilibrium::{residuals, solve, Family, RESIDUAL_TOL};
use crate::format::{sig9, to_json};
use crate::harness::{run_campaign, CampaignOptions, SweepSpec};
use crate::stability::{analyze, characteristic_roots, square_fixture, triangle_fixture, StabilitySpectrum};
use crate::szebehely::{axis, c_crit_surface, ladder, project_max_extensions, regime};
use crate::{Error, Result};

// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "caledonia", version, about = "Symmetric four- and five-body problem toolkit")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "CALEDONIA_OUT", default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve an equilibrium family at one μ or over a μ grid.
    Equilibrium(EquilibriumArgs),
    /// Linear stability of the test body of an equilibrium.
    Stability(StabilityArgs),
    /// Szebehely ladder rungs and the critical constant.
    Ladder(MassArgs),
    /// Maximum-extension projections onto the (ρ1, ρ2) plane.
    Project(ProjectArgs),
    /// C_crit over a (μ0, μ1) grid.
    CcritSurface(SurfaceArgs),
    /// Integrate one orbit.
    Integrate(IntegrateArgs),
    /// Category sweep over an r1×r2 grid.
    Sweep(CampaignArgs),
    /// Hierarchy-change census over an r1×r2 grid.
    Census(CampaignArgs),
    /// Residuals of a family's defining equations at given parameters.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct EquilibriumArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    /// Grid a:b:n of n evenly spaced μ values (overrides --mu).
    #[arg(long, value_parser = parse_grid)]
    pub mu_grid: Option<(f64, f64, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Source {
    /// Solve the configuration and linearize about it.
    Config,
    /// Fixture hessian of the square or triangle case.
    Fixture,
}

#[derive(Args, Debug)]
pub struct StabilityArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    /// Index of the body to perturb (default: 3).
    #[arg(long)]
    pub test_body: Option<usize>,
    /// Hessian source; square and triangle default to their fixtures.
    #[arg(long, value_enum)]
    pub source: Option<Source>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct MassArgs {
    #[arg(long)]
    pub mu0: f64,
    #[arg(long)]
    pub mu1: f64,
}

impl MassArgs {
    fn ratios(&self) -> Result<MassRatios> {
        MassRatios::from_mu0_mu1(self.mu0, self.mu1)
    }
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub mass: MassArgs,
    #[arg(long)]
    pub c0: f64,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct SurfaceArgs {
    /// Grid spacing in μ0 and μ1.
    #[arg(long, default_value_t = 0.005)]
    pub grid: f64,
    /// Only the μ1 = μ2 slice.
    #[arg(long)]
    pub slice: bool,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    #[arg(long, value_enum, default_value_t = Mode::Cs5bp)]
    pub mode: Mode,
    #[command(flatten)]
    pub mass: MassArgs,
    #[arg(long)]
    pub r1: f64,
    #[arg(long)]
    pub r2: f64,
    #[arg(long)]
    pub c0: f64,
    #[arg(long, default_value_t = 0.2)]
    pub e0: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 0.0)]
    pub perturbation: f64,
    /// Also write trajectory.csv.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Args, Debug)]
pub struct CampaignArgs {
    /// JSON file mirroring the sweep spec; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Stop after this many new cells; rerun to resume.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub mu0: Option<f64>,
    #[arg(long, requires = "mu0")]
    pub mu1: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub e0: Option<f64>,
    /// lo:hi
    #[arg(long, value_parser = parse_range)]
    pub r1_range: Option<[f64; 2]>,
    #[arg(long, value_parser = parse_range)]
    pub r2_range: Option<[f64; 2]>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub perturbation: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub energy_threshold: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    /// Comma-separated parameter values in the family's order.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub params: Vec<f64>,
}

fn parse_grid(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 3 {
        return Err("expected a:b:n".into());
    }
    let a = p[0].parse::<f64>().map_err(|e| e.to_string())?;
    let b = p[1].parse::<f64>().map_err(|e| e.to_string())?;
    let n = p[2].parse::<usize>().map_err(|e| e.to_string())?;
    if n == 0 {
        return Err("n must be at least 1".into());
    }
    Ok((a, b, n))
}

fn parse_range(s: &str) -> std::result::Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    Ok([a.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?, b.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?])
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            EXIT_DOMAIN
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

pub fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    fs::create_dir_all(&cli.out)?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::Equilibrium(a) => cmd_equilibrium(out, a)?,
        Command::Stability(a) => cmd_stability(out, a)?,
        Command::Ladder(a) => cmd_ladder(out, a)?,
        Command::Project(a) => cmd_project(out, a)?,
        Command::CcritSurface(a) => cmd_surface(out, a)?,
        Command::Integrate(a) => cmd_integrate(out, a)?,
        Command::Sweep(a) => cmd_campaign(out, a, false)?,
        Command::Census(a) => cmd_campaign(out, a, true)?,
        Command::Check(a) => cmd_check(out, a)?,
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    fs::write(path, to_json(v)?)?;
    Ok(())
}

fn cmd_equilibrium(out: &Path, a: &EquilibriumArgs) -> Result<()> {
    let mus: Vec<f64> = match a.mu_grid {
        Some((lo, hi, 1)) => vec![lo, hi][..1].to_vec(),
        Some((lo, hi, n)) => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
        None => vec![a.mu],
    };
    let path = out.join("equilibrium.csv");
    let mut w = csv::Writer::from_path(&path)?;
    let fam = a.family.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    // columns: every named parameter of the first solution found
    let mut keys: Option<Vec<String>> = None;
    let mut found = 0;
    for mu in mus {
        let sols = match solve(a.family, mu) {
            Ok(s) => s,
            // an empty μ slot in a grid is data, a single request is an error
            Err(e @ Error::NoSolution { .. }) if a.mu_grid.is_some() => {
                eprintln!("mu = {}: {e}", sig9(mu));
                continue;
            }
            Err(e) => return Err(e),
        };
        for s in sols {
            let keys = keys.get_or_insert_with(|| {
                let k: Vec<String> = s.params.keys().cloned().collect();
                let mut header = vec!["family".to_string(), "mu".into(), "branch".into()];
                header.extend(k.iter().cloned());
                header.extend(["n".to_string(), "residual".into()]);
                say!("{}", header.join("  "));
                let _ = w.write_record(&header);
                k
            });
            let res = residuals(s.family, s.mu, &s.param_vector())?.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            let mut row = vec![fam.clone(), sig9(mu), s.branch.map_or(String::new(), |b| b.to_string())];
            row.extend(keys.iter().map(|k| s.param(k).map_or(String::new(), sig9)));
            row.extend([sig9(s.n), sig9(res)]);
            say!("{}", row.join("  "));
            w.write_record(&row)?;
            found += 1;
        }
    }
    w.flush()?;
    if found == 0 {
        return Err(Error::domain(format!("no {fam} solution in the requested mu range")));
    }
    Ok(())
}

#[derive(Serialize)]
struct StabilityReport {
    family: Family,
    mu: f64,
    source: &'static str,
    branch: Option<u8>,
    spectrum: StabilitySpectrum,
}

fn fmt_c(z: Complex64) -> String {
    format!("{}{}{}i", sig9(z.re), if z.im < 0.0 { "-" } else { "+" }, sig9(z.im.abs()))
}

fn cmd_stability(out: &Path, a: &StabilityArgs) -> Result<()> {
    let fixture_ok = matches!(a.family, Family::Square | Family::TriangleEqual);
    let source = a.source.unwrap_or(if fixture_ok { Source::Fixture } else { Source::Config });
    let mut reports = Vec::new();
    match source {
        Source::Fixture => {
            if !fixture_ok {
                return Err(Error::domain("fixtures exist only for the square and triangle families"));
            }
            let sol = &solve(a.family, a.mu)?[0];
            let side = sol.param("a").ok_or_else(|| Error::Internal("missing side length".into()))?;
            let h = if a.family == Family::Square { square_fixture(side) } else { triangle_fixture(side) };
            reports.push(StabilityReport {
                family: a.family,
                mu: a.mu,
                source: "fixture",
                branch: None,
                spectrum: characteristic_roots(&h),
            });
        }
        Source::Config => {
            for sol in solve(a.family, a.mu)? {
                let k = a.test_body.unwrap_or(sol.default_test_body());
                reports.push(StabilityReport {
                    family: a.family,
                    mu: a.mu,
                    source: "config",
                    branch: sol.branch,
                    spectrum: analyze(&sol, k)?,
                });
            }
        }
    }
    for r in &reports {
        let l: Vec<String> = r.spectrum.lambdas.iter().map(|z| fmt_c(*z)).collect();
        let branch = r.branch.map_or(String::new(), |b| format!(" branch {b}"));
        say!("{:?}{branch}: {:?}  lambda = {}", r.family, r.spectrum.verdict, l.join(", "));
    }
    write_json(&out.join("stability.json"), &reports)
}

#[derive(Serialize)]
struct LadderReport {
    ratios: MassRatios,
    rungs: [f64; 4],
    argmins: [f64; 4],
    c_crit: f64,
}

fn cmd_ladder(out: &Path, a: &MassArgs) -> Result<()> {
    let r = a.ratios()?;
    let l = ladder(&r)?;
    for (k, (v, y)) in l.rungs().iter().zip(l.argmins).enumerate() {
        say!("R{}={}  y={}", k + 1, sig9(*v), sig9(y));
    }
    say!("c_crit={}", sig9(l.c_crit));
    write_json(&out.join("ladder.json"), &LadderReport { ratios: r, rungs: l.rungs(), argmins: l.argmins, c_crit: l.c_crit })
}

fn cmd_project(out: &Path, a: &ProjectArgs) -> Result<()> {
    let r = a.mass.ratios()?;
    let curves = project_max_extensions(&r, a.c0, a.samples)?;
    let mut w = csv::Writer::from_path(out.join("projection.csv"))?;
    w.write_record(["y", "rho1", "rho2", "branch"])?;
    for c in &curves {
        for p in &c.points {
            w.write_record([sig9(p[0]), sig9(p[1]), sig9(p[2]), c.label()])?;
        }
    }
    w.flush()?;
    let l = ladder(&r)?;
    say!("{} curves, regime {:?}", curves.len(), regime(a.c0, &l));
    Ok(())
}

fn cmd_surface(out: &Path, a: &SurfaceArgs) -> Result<()> {
    if !(a.grid > 0.0 && a.grid < 0.5) {
        return Err(Error::domain("grid spacing must lie in (0, 0.5)"));
    }
    let mu0s = axis(0.0, 1.0, a.grid);
    let s = if a.slice {
        let pts: Vec<f64> = mu0s.iter().map(|m| 0.25 * (1.0 - m)).collect();
        // μ1 = μ2 pairs each μ0 with one μ1
        let mut all = Vec::new();
        for (m0, m1) in mu0s.iter().zip(pts) {
            all.extend(c_crit_surface(&[*m0], &[m1]).map(|c| c.points).unwrap_or_default());
        }
        let argmax = *all
            .iter()
            .max_by(|x, y| x.c_crit.total_cmp(&y.c_crit))
            .ok_or_else(|| Error::domain("no valid grid points"))?;
        crate::szebehely::CritSurface { points: all, argmax }
    } else {
        c_crit_surface(&mu0s, &axis(0.0, 0.5, a.grid))?
    };
    let mut w = csv::Writer::from_path(out.join("ccrit_surface.csv"))?;
    w.write_record(["mu0", "mu1", "c_crit"])?;
    for p in &s.points {
        w.write_record([sig9(p.mu0), sig9(p.mu1), sig9(p.c_crit)])?;
    }
    w.flush()?;
    say!(
        "max c_crit={} at mu0={} mu1={} ({} points)",
        sig9(s.argmax.c_crit),
        sig9(s.argmax.mu0),
        sig9(s.argmax.mu1),
        s.points.len()
    );
    Ok(())
}

fn cmd_integrate(out: &Path, a: &IntegrateArgs) -> Result<()> {
    let r = a.mass.ratios()?;
    let start = initial_state(a.r1, a.r2, a.c0, a.e0, &r, a.mode, a.perturbation)?;
    let cfg = IntegratorConfig { max_steps: a.steps, ..Default::default() };
    let mon = Monitors {
        regions: Some(HierarchyRegions::new(&r, a.c0, a.e0)?),
        symmetry: a.mode == Mode::General4,
        ..Default::default()
    };
    let mut traj = if a.dump {
        let mut w = csv::Writer::from_path(out.join("trajectory.csv"))?;
        w.write_record(["t", "x1", "y1", "x2", "y2", "vx1", "vy1", "vx2", "vy2", "E", "c", "hierarchy"])?;
        Some(w)
    } else {
        None
    };
    let mut werr: Option<csv::Error> = None;
    let outcome: OrbitOutcome = integrate_observed(&start, &r, &cfg, &mon, &mut |s| {
        if let Some(w) = traj.as_mut() {
            let (r1, r2, v1, v2) = s.state.pair();
            let row = [s.state.t(), r1.x, r1.y, r2.x, r2.y, v1.x, v1.y, v2.x, v2.y, -s.em.e0, s.em.c];
            let mut rec: Vec<String> = row.iter().map(|x| sig9(*x)).collect();
            rec.push(s.hierarchy.label().to_string());
            if let Err(e) = w.write_record(&rec) {
                werr.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = werr {
        return Err(e.into());
    }
    if let Some(mut w) = traj {
        w.flush()?;
    }
    say!(
        "{:?} after {} steps (t = {}), {} hierarchy changes, energy drift {}",
        outcome.terminal,
        outcome.steps_taken,
        sig9(outcome.final_state.t()),
        outcome.hierarchy_changes.len(),
        sig9(outcome.energy_drift)
    );
    write_json(&out.join("outcome.json"), &outcome)
}

fn campaign_spec(a: &CampaignArgs) -> std::result::Result<SweepSpec, Failure> {
    let mut v = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<serde_json::Value>(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => serde_json::json!({}),
    };
    let m = v.as_object_mut().ok_or_else(|| Failure::Usage("config must be a JSON object".into()))?;
    let mut set = |k: &str, x: serde_json::Value| {
        m.insert(k.to_string(), x);
    };
    if let Some(mu0) = a.mu0 {
        let mu1 = a.mu1.unwrap_or(0.25 * (1.0 - mu0));
        let r = MassRatios::from_mu0_mu1(mu0, mu1)?;
        set("ratios", serde_json::to_value(r).map_err(Error::from)?);
    }
    let num = |x: f64| serde_json::json!(x);
    if let Some(x) = a.c0 {
        set("c0", num(x));
    }
    if let Some(x) = a.e0 {
        set("e0", num(x));
    }
    if let Some(x) = a.r1_range {
        set("r1_range", serde_json::json!(x));
    }
    if let Some(x) = a.r2_range {
        set("r2_range", serde_json::json!(x));
    }
    if let Some(x) = a.step {
        set("step", num(x));
    }
    if let Some(x) = a.perturbation {
        set("perturbation", num(x));
    }
    if let Some(x) = a.max_steps {
        set("max_steps", serde_json::json!(x));
    }
    if let Some(x) = a.mode {
        set("mode", serde_json::to_value(x).map_err(Error::from)?);
    }
    if let Some(x) = a.energy_threshold {
        set("energy_threshold", num(x));
    }
    let spec: SweepSpec = match serde_json::from_value(v) {
        Ok(s) => s,
        Err(e) => {
            let msg = e.to_string();
            // mass-ratio validation errors are domain errors, shape errors are usage
            if msg.contains("mass ratio") || msg.contains("expected 1") {
                return Err(Failure::Domain(Error::Domain(msg)));
            }
            return Err(Failure::Usage(format!("sweep spec: {msg}")));
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_campaign(out: &Path, a: &CampaignArgs, census: bool) -> std::result::Result<(), Failure> {
    let spec = campaign_spec(a)?;
    let rep = run_campaign(out, &spec, &CampaignOptions { jobs: a.jobs, limit: a.limit })?;
    let mut so = std::io::stdout().lock();
    match &rep.results {
        None => {
            writeln!(so, "{}/{} cells done (resumed {}); rerun to continue", rep.done, rep.cells, rep.resumed)?;
        }
        Some((grid, table)) => {
            if census {
                writeln!(so, "{} orbits, {} forbidden starts, {} changes", table.orbits, table.forbidden, table.total())?;
                for (from, to, n, pct) in table.entries() {
                    writeln!(so, "{from} -> {to}  {n:>6}  {pct:5.1}%")?;
                }
            } else {
                for (code, n) in grid.tally() {
                    writeln!(so, "{code:>9}  {n}")?;
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckReport {
    family: Family,
    mu: f64,
    params: Vec<f64>,
    residuals: Vec<f64>,
    max_abs: f64,
    ok: bool,
}

fn cmd_check(out: &Path, a: &CheckArgs) -> std::result::Result<(), Failure> {
    let want = a.family.param_names().len();
    if a.params.len() != want {
        return Err(Failure::Usage(format!(
            "{:?} takes {want} parameter(s): {}",
            a.family,
            a.family.param_names().join(", ")
        )));
    }
    let res = residuals(a.family, a.mu, &a.params)?;
    let max_abs = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    for (k, r) in res.iter().enumerate() {
        say!("residual[{k}] = {}", sig9(*r));
    }
    let ok = max_abs <= RESIDUAL_TOL;
    say!("max |residual| = {} ({})", sig9(max_abs), if ok { "ok" } else { "not an equilibrium" });
    write_json(
        &out.join("check.json"),
        &CheckReport { family: a.family, mu: a.mu, params: a.params.clone(), residuals: res, max_abs, ok },
    )?;
    Ok(())
}
