//! Phase-space campaigns: r1×r2 category sweeps and hierarchy-change
//! census tables, with an append-only checkpoint so that an interrupted
//! campaign can resume.
//!
//! A campaign directory holds `manifest.json` (written first), the
//! checkpoint `cells.jsonl` (one record per finished cell, in cell order)
//! and, once every cell is done, `grid.csv` and `changes.csv`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::common::{Hierarchy, MassRatios};
use crate::dynamics::{initial_state, integrate, HierarchyRegions, IntegratorConfig, Mode, Monitors, Terminal};
use crate::dynamics::{ENERGY_THRESHOLD, SYMMETRY_THRESHOLD};
use crate::format::sig9;
use crate::szebehely::axis;
use crate::{Error, Result};

pub const MANIFEST: &str = "manifest.json";
pub const CHECKPOINT: &str = "cells.jsonl";
pub const GRID_CSV: &str = "grid.csv";
pub const CHANGES_CSV: &str = "changes.csv";

/// Cells finished between checkpoint appends.
const CHUNK: usize = 64;

fn default_mode() -> Mode {
    Mode::Cs5bp
}
fn default_energy_threshold() -> f64 {
    ENERGY_THRESHOLD
}
fn default_symmetry_threshold() -> f64 {
    SYMMETRY_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub ratios: MassRatios,
    pub c0: f64,
    pub e0: f64,
    /// Inclusive [lo, hi] of the P1 start distance.
    pub r1_range: [f64; 2],
    pub r2_range: [f64; 2],
    pub step: f64,
    /// x-offset applied to P1 before integration (general mode).
    #[serde(default)]
    pub perturbation: f64,
    pub max_steps: u64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Relative energy error read as a close encounter.
    #[serde(default = "default_energy_threshold")]
    pub energy_threshold: f64,
    #[serde(default = "default_symmetry_threshold")]
    pub symmetry_threshold: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.r1_range;
        let [c, d] = self.r2_range;
        if !(a > 0.0 && b >= a && c > 0.0 && d >= c) {
            return Err(Error::domain("ranges must be positive with lo <= hi"));
        }
        if !(self.step > 0.0) {
            return Err(Error::domain("step must be positive"));
        }
        if !(self.perturbation >= 0.0) {
            return Err(Error::domain("perturbation must be non-negative"));
        }
        if !(self.e0 > 0.0 && self.c0 >= 0.0) {
            return Err(Error::domain("need e0 > 0 and c0 >= 0"));
        }
        if self.max_steps == 0 {
            return Err(Error::domain("max_steps must be at least 1"));
        }
        if !(self.energy_threshold > 0.0 && self.symmetry_threshold > 0.0) {
            return Err(Error::domain("monitor thresholds must be positive"));
        }
        if !(self.ratios.mu1 > 0.0 && self.ratios.mu2 > 0.0) {
            return Err(Error::domain("both pairs need positive mass"));
        }
        if self.mode == Mode::General4 && self.ratios.mu0 != 0.0 {
            return Err(Error::domain("the general four-body mode has no central mass (mu0 must be 0)"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        let [a, b] = self.r1_range;
        let [c, d] = self.r2_range;
        Grid { r1: axis(a, b, self.step), r2: axis(c, d, self.step) }
    }
}

/// Start positions; cell (i, j) is r1[i], r2[j] and has index i·|r2| + j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
}

impl Grid {
    pub fn new(r1: Vec<f64>, r2: Vec<f64>) -> Result<Self> {
        if r1.is_empty() || r2.is_empty() || r1.iter().chain(&r2).any(|x| !(*x > 0.0)) {
            return Err(Error::domain("grid axes must be non-empty and positive"));
        }
        Ok(Grid { r1, r2 })
    }

    pub fn len(&self) -> usize {
        self.r1.len() * self.r2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, cell: usize) -> (f64, f64) {
        let n2 = self.r2.len();
        (self.r1[cell / n2], self.r2[cell % n2])
    }
}

/// Outcome category of one start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CellCode {
    Forbidden,
    /// Close encounter of P_i and P_j, i < j.
    Collision(u8, u8),
    SymmetryBroken,
    Stable,
}

impl CellCode {
    pub fn collision(pair: [u8; 2]) -> Self {
        CellCode::Collision(pair[0].min(pair[1]), pair[0].max(pair[1]))
    }

    /// Applies the P1↔P2 relabeling (and P3↔P4) of an r1↔r2 swap.
    pub fn swapped(self) -> Self {
        let s = |k: u8| match k {
            1 => 2,
            2 => 1,
            3 => 4,
            4 => 3,
            k => k,
        };
        match self {
            CellCode::Collision(i, j) => CellCode::collision([s(i), s(j)]),
            c => c,
        }
    }
}

impl fmt::Display for CellCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellCode::Forbidden => f.write_str("FORBIDDEN"),
            CellCode::Collision(i, j) => write!(f, "C{i}{j}"),
            CellCode::SymmetryBroken => f.write_str("SYMBREAK"),
            CellCode::Stable => f.write_str("STABLE"),
        }
    }
}

impl FromStr for CellCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "FORBIDDEN" => CellCode::Forbidden,
            "SYMBREAK" => CellCode::SymmetryBroken,
            "STABLE" => CellCode::Stable,
            _ => {
                let b = s.as_bytes();
                let ok = |c: u8| (b'1'..=b'4').contains(&c);
                if b.len() == 3 && b[0] == b'C' && ok(b[1]) && ok(b[2]) && b[1] < b[2] {
                    CellCode::Collision(b[1] - b'0', b[2] - b'0')
                } else {
                    return Err(Error::domain(format!("unknown cell code {s:?}")));
                }
            }
        })
    }
}

impl TryFrom<String> for CellCode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CellCode> for String {
    fn from(c: CellCode) -> String {
        c.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryGrid {
    pub grid: Grid,
    /// Row-major codes, see [`Grid`].
    pub codes: Vec<CellCode>,
}

impl CategoryGrid {
    pub fn code(&self, i1: usize, i2: usize) -> CellCode {
        self.codes[i1 * self.grid.r2.len() + i2]
    }

    pub fn tally(&self) -> BTreeMap<CellCode, usize> {
        let mut m = BTreeMap::new();
        for c in &self.codes {
            *m.entry(*c).or_insert(0) += 1;
        }
        m
    }

    /// Fraction of cells with the same code in both grids.
    pub fn agreement(&self, other: &CategoryGrid) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::domain("grids differ"));
        }
        let same = self.codes.iter().zip(&other.codes).filter(|(a, b)| a == b).count();
        Ok(same as f64 / self.codes.len() as f64)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r1", "r2", "code"])?;
        for (k, c) in self.codes.iter().enumerate() {
            let (r1, r2) = self.grid.point(k);
            w.write_record([sig9(r1), sig9(r2), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn h_index(h: Hierarchy) -> Option<usize> {
    Hierarchy::DETERMINED.iter().position(|x| *x == h)
}

/// Hierarchy-change counts over the 12 ordered transitions between the
/// four determined states.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeTable {
    /// counts[from][to] in the order of [`Hierarchy::DETERMINED`].
    pub counts: [[u64; 4]; 4],
    /// Orbits integrated (starts that were not forbidden).
    pub orbits: u64,
    pub forbidden: u64,
}

impl ChangeTable {
    pub fn record(&mut self, from: Hierarchy, to: Hierarchy) {
        if let (Some(i), Some(j)) = (h_index(from), h_index(to)) {
            if i != j {
                self.counts[i][j] += 1;
            }
        }
    }

    pub fn count(&self, from: Hierarchy, to: Hierarchy) -> u64 {
        match (h_index(from), h_index(to)) {
            (Some(i), Some(j)) => self.counts[i][j],
            _ => 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// (from, to, count, percent of total) for the 12 transitions.
    pub fn entries(&self) -> Vec<(Hierarchy, Hierarchy, u64, f64)> {
        let total = self.total();
        let mut out = Vec::with_capacity(12);
        for (i, from) in Hierarchy::DETERMINED.iter().enumerate() {
            for (j, to) in Hierarchy::DETERMINED.iter().enumerate() {
                if i != j {
                    let n = self.counts[i][j];
                    let pct = if total > 0 { 100.0 * n as f64 / total as f64 } else { 0.0 };
                    out.push((*from, *to, n, pct));
                }
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["from", "to", "count", "percent"])?;
        for (from, to, n, pct) in self.entries() {
            w.write_record([from.label().to_string(), to.label().to_string(), n.to_string(), format!("{pct:.1}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of one start, as stored in the checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRecord {
    pub cell: usize,
    pub code: CellCode,
    /// Hierarchy changes in time order.
    pub changes: Vec<(Hierarchy, Hierarchy)>,
}

struct CellRunner {
    ratios: MassRatios,
    c0: f64,
    e0: f64,
    mode: Mode,
    perturbation: f64,
    cfg: IntegratorConfig,
    mon: Monitors,
}

impl CellRunner {
    fn from_spec(s: &SweepSpec) -> Result<Self> {
        s.validate()?;
        Ok(CellRunner {
            ratios: s.ratios,
            c0: s.c0,
            e0: s.e0,
            mode: s.mode,
            perturbation: s.perturbation,
            cfg: IntegratorConfig { max_steps: s.max_steps, ..Default::default() },
            mon: Monitors {
                regions: Some(HierarchyRegions::new(&s.ratios, s.c0, s.e0)?),
                symmetry: s.mode == Mode::General4,
                symmetry_threshold: s.symmetry_threshold,
                energy_threshold: s.energy_threshold,
            },
        })
    }

    // A start with r1 = r2 puts P1 on P2 and is coded as an immediate
    // 12 collision.
    fn run(&self, cell: usize, r1: f64, r2: f64) -> Result<CellRecord> {
        let start = initial_state(r1, r2, self.c0, self.e0, &self.ratios, self.mode, self.perturbation);
        let start = match start {
            Ok(s) => s,
            Err(Error::Forbidden(_)) => return Ok(CellRecord { cell, code: CellCode::Forbidden, changes: vec![] }),
            Err(Error::Coincident(i, j)) => {
                return Ok(CellRecord { cell, code: CellCode::collision([i as u8, j as u8]), changes: vec![] })
            }
            Err(e) => return Err(e),
        };
        let out = integrate(&start, &self.ratios, &self.cfg, &self.mon)?;
        let code = match out.terminal {
            Terminal::Collision { pair, .. } => CellCode::collision(pair),
            Terminal::SymmetryBroken { .. } => CellCode::SymmetryBroken,
            Terminal::Completed => CellCode::Stable,
        };
        let changes = out.hierarchy_changes.iter().map(|c| (c.from, c.to)).collect();
        Ok(CellRecord { cell, code, changes })
    }
}

fn collect(grid: &Grid, records: &[CellRecord]) -> (CategoryGrid, ChangeTable) {
    let mut table = ChangeTable::default();
    let codes = records
        .iter()
        .map(|r| {
            if r.code == CellCode::Forbidden {
                table.forbidden += 1;
            } else {
                table.orbits += 1;
            }
            for (from, to) in &r.changes {
                table.record(*from, *to);
            }
            r.code
        })
        .collect();
    (CategoryGrid { grid: grid.clone(), codes }, table)
}

fn run_all(runner: &CellRunner, grid: &Grid) -> Result<Vec<CellRecord>> {
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (r1, r2) = grid.point(k);
            runner.run(k, r1, r2)
        })
        .collect()
}

/// Integrates every grid start and records its category. Cells run in
/// parallel; the result does not depend on the schedule.
pub fn run_sweep(spec: &SweepSpec) -> Result<CategoryGrid> {
    let runner = CellRunner::from_spec(spec)?;
    let grid = spec.grid();
    let records = run_all(&runner, &grid)?;
    Ok(collect(&grid, &records).0)
}

/// Hierarchy changes of reduced-problem orbits from every start of `grid`.
pub fn run_change_census(ratios: &MassRatios, c0: f64, e0: f64, grid: &Grid, max_steps: u64) -> Result<ChangeTable> {
    let spec = SweepSpec {
        ratios: *ratios,
        c0,
        e0,
        r1_range: [grid.r1[0], grid.r1[0]],
        r2_range: [grid.r2[0], grid.r2[0]],
        step: 1.0,
        perturbation: 0.0,
        max_steps,
        mode: Mode::Cs5bp,
        energy_threshold: ENERGY_THRESHOLD,
        symmetry_threshold: SYMMETRY_THRESHOLD,
    };
    let records = run_all(&CellRunner::from_spec(&spec)?, grid)?;
    Ok(collect(grid, &records).1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub spec: SweepSpec,
    pub cells: usize,
    /// The campaign is deterministic; no random seeds are drawn.
    pub seeds: Vec<u64>,
}

impl Manifest {
    pub fn new(spec: &SweepSpec) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            spec: spec.clone(),
            cells: spec.grid().len(),
            seeds: vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CampaignOptions {
    /// Worker threads; 0 uses every core, 1 runs serially.
    pub jobs: usize,
    /// Stop after this many new cells (for staged runs).
    pub limit: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub cells: usize,
    pub done: usize,
    /// Cells found in the checkpoint at start.
    pub resumed: usize,
    /// Present once every cell is done.
    pub results: Option<(CategoryGrid, ChangeTable)>,
}

fn read_checkpoint(path: &Path, cells: usize) -> Result<Vec<CellRecord>> {
    let refuse = |why: String| Error::ResumeRefused(format!("{}: {why}", path.display()));
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(vec![]),
        Err(e) => return Err(e.into()),
    };
    let mut records: Vec<CellRecord> = Vec::new();
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    let mut lineno = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        lineno += 1;
        if !line.ends_with('\n') {
            return Err(refuse(format!("line {lineno} is truncated")));
        }
        let rec: CellRecord =
            serde_json::from_str(line.trim_end()).map_err(|e| refuse(format!("line {lineno}: {e}")))?;
        if rec.cell != records.len() || rec.cell >= cells {
            return Err(refuse(format!("line {lineno}: unexpected cell {}", rec.cell)));
        }
        records.push(rec);
    }
    Ok(records)
}

/// Runs (or resumes) a campaign in `dir`. Finished cells are appended to
/// the checkpoint in cell order; a checkpoint that does not parse, or a
/// manifest for a different spec, refuses the resume.
pub fn run_campaign(dir: &Path, spec: &SweepSpec, opts: &CampaignOptions) -> Result<CampaignReport> {
    let runner = CellRunner::from_spec(spec)?;
    let grid = spec.grid();
    fs::create_dir_all(dir)?;
    let manifest = Manifest::new(spec);
    let mpath = dir.join(MANIFEST);
    if mpath.exists() {
        let old: Manifest = serde_json::from_str(&fs::read_to_string(&mpath)?)
            .map_err(|e| Error::ResumeRefused(format!("{}: {e}", mpath.display())))?;
        if old.spec != manifest.spec {
            return Err(Error::ResumeRefused("campaign directory holds a different spec".into()));
        }
    } else {
        fs::write(&mpath, serde_json::to_string_pretty(&manifest)? + "\n")?;
    }

    let cpath = dir.join(CHECKPOINT);
    let mut records = read_checkpoint(&cpath, grid.len())?;
    let resumed = records.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let mut out = OpenOptions::new().create(true).append(true).open(&cpath)?;
    let stop = opts.limit.map_or(grid.len(), |n| (resumed + n).min(grid.len()));
    while records.len() < stop {
        let lo = records.len();
        let hi = (lo + CHUNK).min(stop);
        let chunk: Vec<CellRecord> = pool.install(|| {
            (lo..hi)
                .into_par_iter()
                .map(|k| {
                    let (r1, r2) = grid.point(k);
                    runner.run(k, r1, r2)
                })
                .collect::<Result<_>>()
        })?;
        let mut buf = String::new();
        for r in &chunk {
            buf.push_str(&serde_json::to_string(r)?);
            buf.push('\n');
        }
        out.write_all(buf.as_bytes())?;
        out.flush()?;
        records.extend(chunk);
    }

    let results = (records.len() == grid.len()).then(|| collect(&grid, &records));
    if let Some((g, t)) = &results {
        g.write_csv(&dir.join(GRID_CSV))?;
        t.write_csv(&dir.join(CHANGES_CSV))?;
    }
    Ok(CampaignReport { cells: grid.len(), done: records.len(), resumed, results })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        for c in [CellCode::Forbidden, CellCode::Stable, CellCode::SymmetryBroken, CellCode::collision([4, 2])] {
            assert_eq!(c.to_string().parse::<CellCode>().unwrap(), c);
        }
        assert_eq!(CellCode::collision([4, 2]).to_string(), "C24");
        assert!("C21".parse::<CellCode>().is_err());
        assert_eq!(CellCode::collision([1, 3]).swapped(), CellCode::collision([2, 4]));
    }

    #[test]
    fn axis_includes_end() {
        assert_eq!(axis(0.1, 1.5, 0.1).len(), 15);
        assert_eq!(axis(0.03, 1.5, 0.03).len(), 50);
    }

    #[test]
    fn percentages() {
        let mut t = ChangeTable::default();
        t.record(Hierarchy::H24, Hierarchy::H13);
        t.record(Hierarchy::H24, Hierarchy::H13);
        t.record(Hierarchy::H12, Hierarchy::H14);
        t.record(Hierarchy::H12, Hierarchy::Undetermined);
        assert_eq!(t.total(), 3);
        let e = t.entries();
        assert_eq!(e.len(), 12);
        let sum: f64 = e.iter().map(|x| x.3).sum();
        assert!((sum - 100.0).abs() < 1e-9);
    }
}
