//! Grid-refinement studies against exact front-tracked solutions.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flux::{ConvexFlux, NumericalFlux, Scheme};
use crate::front::{advance, FrontState};
use crate::grid::{project, Grid, GridFunction};
use crate::metrics::{l1_distance, w1};
use crate::solver::{run, Order, SchemeConfig};
use crate::step::StepFunction;

/// Required distance between shocks and window ends, in coarsest cells.
pub const MARGIN_CELLS: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            other => Err(Error::Config(format!(
                "unknown format '{other}' (expected csv or markdown)"
            ))),
        }
    }
}

/// Parameters of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub order: Order,
    pub physical_flux: String,
    pub cfl_number: f64,
    pub t_final: f64,
    /// Cells per unit of the nominal domain; `dx = (b - a) / n`.
    pub cells: Vec<usize>,
    pub domain: (f64, f64),
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    /// Widen the window when shocks come closer than the margin to its ends.
    pub auto_widen: bool,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Godunov,
            order: Order::Monotone1,
            physical_flux: "burgers".into(),
            cfl_number: 0.3,
            t_final: 0.15,
            cells: vec![32, 64, 128, 256, 512, 1024, 2048, 4096],
            domain: (0.0, 1.0),
            breakpoints: vec![0.25, 0.5],
            values: vec![2.0, 1.0, 0.0],
            auto_widen: true,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Config(format!("bad entry '{s}' for '{key}'")))
        })
        .collect()
}

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("bad value '{value}' for '{key}'")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "flux" | "scheme" => self.scheme = value.parse()?,
            "order" => self.order = value.parse()?,
            "physical_flux" => self.physical_flux = value.to_string(),
            "cfl" => self.cfl_number = parse_scalar(key, value)?,
            "t" | "t_final" => self.t_final = parse_scalar(key, value)?,
            "cells" => self.cells = parse_list(key, value)?,
            "domain" => {
                let v: Vec<f64> = parse_list(key, value)?;
                if v.len() != 2 {
                    return Err(Error::Config("domain needs two numbers".into()));
                }
                self.domain = (v[0], v[1]);
            }
            "breakpoints" => self.breakpoints = parse_list(key, value)?,
            "values" => self.values = parse_list(key, value)?,
            "auto_widen" => self.auto_widen = parse_scalar(key, value)?,
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Parses flat `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            cfg.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn initial_data(&self) -> Result<StepFunction> {
        StepFunction::new(self.breakpoints.clone(), self.values.clone())
    }

    pub fn flux(&self) -> Result<ConvexFlux> {
        ConvexFlux::by_name(&self.physical_flux)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::Config("no cell counts given".into()));
        }
        if self.cells.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "cell counts must be strictly increasing".into(),
            ));
        }
        if self.cells[0] < 2 {
            return Err(Error::Config("need at least 2 cells".into()));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!(
                "invalid final time {}",
                self.t_final
            )));
        }
        if !(self.cfl_number > 0.0 && self.cfl_number <= 1.0) {
            return Err(Error::Config(format!(
                "CFL number {} must lie in (0, 1]",
                self.cfl_number
            )));
        }
        if !(self.domain.1 > self.domain.0) {
            return Err(Error::Config("empty domain".into()));
        }
        if !self.initial_data()?.is_decreasing() {
            return Err(Error::NotDecreasing);
        }
        self.flux()?;
        Ok(())
    }

    /// Extent `[lo, hi]` swept by the shocks over `[0, t_final]`.
    pub fn shock_envelope(&self) -> Result<Option<(f64, f64)>> {
        let u0 = self.initial_data()?;
        if u0.num_jumps() == 0 {
            return Ok(None);
        }
        let f = self.flux()?;
        let s0 = FrontState::new(&u0, &f, 0.0)?;
        let s1 = advance(&s0, &f, self.t_final)?;
        let lo = s0.positions()[0].min(s1.positions()[0]);
        let hi = s0.positions()[s0.num_shocks() - 1].max(s1.positions()[s1.num_shocks() - 1]);
        Ok(Some((lo, hi)))
    }

    /// Window `[a, b]` with the required margins at the coarsest grid.
    pub fn window(&self) -> Result<(f64, f64)> {
        let (a, b) = self.domain;
        let Some((lo, hi)) = self.shock_envelope()? else {
            return Ok((a, b));
        };
        let dx_coarse = (b - a) / self.cells[0] as f64;
        let margin = MARGIN_CELLS * dx_coarse;
        let need_left = (a + margin - lo).max(0.0);
        let need_right = (hi + margin - b).max(0.0);
        if (need_left > 0.0 || need_right > 0.0) && !self.auto_widen {
            return Err(Error::WindowTooSmall(format!(
                "shocks sweep [{lo}, {hi}] but [{a}, {b}] leaves less than {MARGIN_CELLS} cells of margin"
            )));
        }
        let left_cells = (need_left / dx_coarse - 1e-9).ceil().max(0.0);
        let right_cells = (need_right / dx_coarse - 1e-9).ceil().max(0.0);
        Ok((a - left_cells * dx_coarse, b + right_cells * dx_coarse))
    }

    /// Grid for `n` cells per nominal domain, covering the widened window.
    pub fn grid_for(&self, n: usize) -> Result<Grid> {
        let (a, b) = self.domain;
        let dx = (b - a) / n as f64;
        let (wa, wb) = self.window()?;
        let left = ((a - wa) / dx - 1e-9).ceil().max(0.0);
        let right = ((wb - b) / dx - 1e-9).ceil().max(0.0);
        Grid::new(a - left * dx, dx, n + left as usize + right as usize)
    }
}

/// `log(err_coarse / err_fine) / log(ratio)`.
pub fn observed_order(err_coarse: f64, err_fine: f64, ratio: f64) -> Result<f64> {
    for e in [err_coarse, err_fine] {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::DegenerateError(e));
        }
    }
    if !(ratio > 1.0) {
        return Err(Error::Config(format!(
            "refinement ratio {ratio} must exceed 1"
        )));
    }
    Ok((err_coarse / err_fine).ln() / ratio.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub n: usize,
    pub l1: f64,
    pub l1_ooc: Option<f64>,
    pub w1: f64,
    pub w1_ooc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    /// Builds the table and its OOC columns from `(n, l1, w1)` triples.
    pub fn from_errors(errors: &[(usize, f64, f64)]) -> Result<Self> {
        let mut rows: Vec<ErrorRow> = Vec::with_capacity(errors.len());
        for (k, &(n, l1, w1)) in errors.iter().enumerate() {
            let (l1_ooc, w1_ooc) = if k == 0 {
                (None, None)
            } else {
                let (n0, l0, w0) = errors[k - 1];
                let ratio = n as f64 / n0 as f64;
                (
                    Some(observed_order(l0, l1, ratio)?),
                    Some(observed_order(w0, w1, ratio)?),
                )
            };
            rows.push(ErrorRow {
                n,
                l1,
                l1_ooc,
                w1,
                w1_ooc,
            });
        }
        Ok(Self { rows })
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn w1_errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.w1).collect()
    }

    pub fn l1_errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.l1).collect()
    }
}

/// Error of one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelResult {
    pub n: usize,
    pub l1: f64,
    pub w1: f64,
    pub steps: usize,
}

/// Largest deviation from the far states at either end of the window,
/// relative to the total variation.
fn tail_deviation(u: &GridFunction) -> f64 {
    let v = u.values();
    let dev = (v[0] - u.far_left())
        .abs()
        .max((v[v.len() - 1] - u.far_right()).abs());
    dev / u.tv().max(f64::MIN_POSITIVE)
}

const TAIL_FLATNESS: f64 = 1e-12;
const MAX_WIDENINGS: usize = 12;

/// Runs one refinement level; the window grows while the numerical tails
/// are not flat at its ends.
pub fn run_level(cfg: &RunConfig, n: usize) -> Result<LevelResult> {
    let f = cfg.flux()?;
    let u0 = cfg.initial_data()?;
    let base = cfg.grid_for(n)?;
    let scheme = SchemeConfig::new(
        NumericalFlux::new(cfg.scheme, f.clone()),
        cfg.order,
        cfg.cfl_number,
    );
    let exact = crate::front::evolve(&u0, &f, cfg.t_final)?;
    let mut pad = 0usize;
    for _ in 0..=MAX_WIDENINGS {
        let grid = Grid::new(
            base.x_left() - pad as f64 * base.dx(),
            base.dx(),
            base.n_cells() + 2 * pad,
        )?;
        let uh0 = project(&u0, &grid)?;
        let (uh, steps) = run(&uh0, &scheme, cfg.t_final)?;
        if tail_deviation(&uh) <= TAIL_FLATNESS {
            return Ok(LevelResult {
                n,
                l1: l1_distance(&uh, &exact)?,
                w1: w1(&exact, &uh)?,
                steps,
            });
        }
        if !cfg.auto_widen {
            break;
        }
        pad = (2 * pad).max(base.n_cells() / 4).max(16);
    }
    Err(Error::WindowTooSmall(format!(
        "numerical tails are not flat at the window ends for n = {n}"
    )))
}

/// Runs every refinement level (in parallel) and assembles the table in
/// the order of `cfg.cells`.
pub fn run_study(cfg: &RunConfig) -> Result<ErrorTable> {
    cfg.validate()?;
    cfg.window()?;
    let levels: Vec<LevelResult> = cfg
        .cells
        .par_iter()
        .map(|&n| run_level(cfg, n))
        .collect::<Result<_>>()?;
    let errors: Vec<(usize, f64, f64)> = levels.iter().map(|l| (l.n, l.l1, l.w1)).collect();
    ErrorTable::from_errors(&errors)
}

fn fmt_err(x: f64) -> String {
    format!("{x:.2e}")
}

fn fmt_ooc(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3}")).unwrap_or_default()
}

pub const CSV_HEADER: [&str; 5] = ["n", "l1", "l1_ooc", "w1", "w1_ooc"];

/// Renders the table as CSV or markdown text.
pub fn render(table: &ErrorTable, format: OutputFormat) -> Result<String> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Csv {
                path: PathBuf::from("<memory>"),
                source: e,
            };
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            for r in &table.rows {
                w.write_record([
                    r.n.to_string(),
                    fmt_err(r.l1),
                    fmt_ooc(r.l1_ooc),
                    fmt_err(r.w1),
                    fmt_ooc(r.w1_ooc),
                ])
                .map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Csv {
                path: PathBuf::from("<memory>"),
                source: e.into_error().into(),
            })?;
            Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
        }
        OutputFormat::Markdown => {
            let mut s = String::from("| n | L1 | L1 OOC | W1 | W1 OOC |\n|---|---|---|---|---|\n");
            for r in &table.rows {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} |",
                    r.n,
                    fmt_err(r.l1),
                    fmt_ooc(r.l1_ooc),
                    fmt_err(r.w1),
                    fmt_ooc(r.w1_ooc)
                );
            }
            Ok(s)
        }
    }
}

/// Writes the rendered table to `path`.
pub fn emit(table: &ErrorTable, format: OutputFormat, path: &Path) -> Result<()> {
    let text = render(table, format)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses CSV produced by [`render`].
pub fn parse_csv(text: &str) -> Result<ErrorTable> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let path = PathBuf::from("<memory>");
    let headers = rd.headers().map_err(|e| Error::Csv {
        path: path.clone(),
        source: e,
    })?;
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Config(format!(
            "unexpected CSV header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::Csv {
            path: path.clone(),
            source: e,
        })?;
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_scalar("ooc", s).map(Some)
            }
        };
        rows.push(ErrorRow {
            n: parse_scalar("n", &rec[0])?,
            l1: parse_scalar("l1", &rec[1])?,
            l1_ooc: opt(&rec[2])?,
            w1: parse_scalar("w1", &rec[3])?,
            w1_ooc: opt(&rec[4])?,
        });
    }
    Ok(ErrorTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observed_order_examples() {
        let o = observed_order(1.775e-3, 6.523e-4, 2.0).unwrap();
        assert!((o - 1.4442).abs() < 1e-4);
        assert_eq!(observed_order(1.0, 1.0, 2.0).unwrap(), 0.0);
        assert!((observed_order(1.0, 0.25, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            observed_order(0.0, 1.0, 2.0),
            Err(Error::DegenerateError(_))
        ));
    }

    #[test]
    fn config_parsing_and_overrides() {
        let cfg = RunConfig::parse(
            "# study\nflux = eo\norder = 1\ncfl = 0.25\nt = 0.3\ncells = 16, 32\nformat = markdown\n",
        )
        .unwrap();
        assert_eq!(cfg.scheme, Scheme::EngquistOsher);
        assert_eq!(cfg.cells, vec![16, 32]);
        assert_eq!(cfg.t_final, 0.3);
        assert_eq!(cfg.format, OutputFormat::Markdown);
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(RunConfig::parse("cells 12").is_err());
        let c = RunConfig {
            cells: vec![64, 32],
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn window_is_widened_for_the_margin() {
        let cfg = RunConfig::default();
        let (a, b) = cfg.window().unwrap();
        // shocks sweep [0.25, 0.575]; 15 cells of 1/32 is 0.46875
        assert!((a - (-7.0 / 32.0)).abs() < 1e-15);
        assert!((b - (1.0 + 2.0 / 32.0)).abs() < 1e-15);
        let g = cfg.grid_for(64).unwrap();
        assert_eq!(g.n_cells(), 64 + 14 + 4);
        let strict = RunConfig {
            auto_widen: false,
            ..RunConfig::default()
        };
        assert!(matches!(strict.window(), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn single_level_table() {
        let t = ErrorTable::from_errors(&[(32, 1e-2, 1e-4)]).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!(t.rows[0].w1_ooc.is_none());
        let csv = render(&t, OutputFormat::Csv).unwrap();
        assert_eq!(csv, "n,l1,l1_ooc,w1,w1_ooc\n32,1.00e-2,,1.00e-4,\n");
        assert!(matches!(
            render(&ErrorTable::default(), OutputFormat::Csv),
            Err(Error::EmptyTable)
        ));
    }

    #[test]
    fn csv_round_trip() {
        let t = ErrorTable::from_errors(&[
            (32, 3.1e-2, 8.6e-4),
            (64, 1.9e-2, 2.2e-4),
            (128, 6.7e-3, 3.9e-5),
        ])
        .unwrap();
        let text = render(&t, OutputFormat::Csv).unwrap();
        let back = parse_csv(&text).unwrap();
        assert_eq!(render(&back, OutputFormat::Csv).unwrap(), text);
        assert_eq!(back.rows[1].w1, 2.2e-4);
    }
}
