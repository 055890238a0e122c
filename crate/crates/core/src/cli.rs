//! Batch front-end plumbing: run configuration with layered precedence
//! (defaults < config file < command-line flags), CSV trajectory emission,
//! region classification of the information-flow trajectories, and gnuplot
//! script generation.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::channels::{apply_to_system, GadChannel, GadParams};
use crate::correlations::{eof, info_breakdown_ae, mutual_information_sa};
use crate::error::{QError, Result};
use crate::nonmarkov::TimeGrid;
use crate::qlinalg::PureStateVector;

/// Sign changes at or below this magnitude are treated as zero when
/// classifying region intervals.
pub const REGION_SIGN_TOL: f64 = 1e-12;
/// Leading intervals with inaccessible information below this are the
/// initial transient and are skipped.
pub const REGION_TRANSIENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Gad,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateChoice {
    Bell,
    Paper,
    Custom { a: f64, b: f64, c: f64 },
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub channel: ChannelKind,
    pub omega: f64,
    pub t_c: f64,
    pub t_end: f64,
    pub steps: usize,
    pub state: StateChoice,
    pub seed: u64,
    pub output_path: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            channel: ChannelKind::Gad,
            omega: 5.0,
            t_c: 0.25,
            t_end: 1.0,
            steps: 4000,
            state: StateChoice::Bell,
            seed: 42,
            output_path: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 || self.t_end <= 0.0 || self.t_c < 0.0 {
            return Err(QError::Inconsistent(format!(
                "invalid run configuration: steps={}, t_end={}, t_c={}",
                self.steps, self.t_end, self.t_c
            )));
        }
        if let StateChoice::Custom { a, b, c } = self.state {
            if a * a + b * b + c * c > 1.0 + 1e-12 {
                return Err(QError::Inconsistent(
                    "custom state needs a²+b²+c² ≤ 1".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn channel(&self) -> Result<GadChannel> {
        Ok(GadChannel::new(GadParams::new(self.omega, self.t_c)?))
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(0.0, self.t_end, self.steps)
    }

    pub fn initial_state(&self) -> Result<PureStateVector> {
        match self.state {
            StateChoice::Bell => Ok(PureStateVector::bell_phi_plus()),
            StateChoice::Paper => Ok(crate::nonmarkov::example_state()),
            StateChoice::Custom { a, b, c } => crate::nonmarkov::custom_state(a, b, c),
        }
    }
}

/// Unresolved overlay of configuration values; `None` means "not set here".
#[derive(Debug, Clone, Default)]
pub struct ConfigOverlay {
    pub channel: Option<ChannelKind>,
    pub omega: Option<f64>,
    pub t_c: Option<f64>,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
    pub state: Option<StateChoice>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub seed: Option<u64>,
    pub output_path: Option<String>,
}

impl ConfigOverlay {
    /// Applies this overlay on top of `base`. Custom-state coefficients are
    /// taken from the overlay when given, falling back per coefficient.
    pub fn apply(&self, mut base: RunConfig) -> RunConfig {
        if let Some(v) = self.channel {
            base.channel = v;
        }
        if let Some(v) = self.omega {
            base.omega = v;
        }
        if let Some(v) = self.t_c {
            base.t_c = v;
        }
        if let Some(v) = self.t_end {
            base.t_end = v;
        }
        if let Some(v) = self.steps {
            base.steps = v;
        }
        if let Some(v) = self.state {
            base.state = v;
        }
        if self.a.is_some() || self.b.is_some() || self.c.is_some() {
            let (mut a, mut b, mut c) = match base.state {
                StateChoice::Custom { a, b, c } => (a, b, c),
                _ => (0.0, 0.0, 0.0),
            };
            if let Some(v) = self.a {
                a = v;
            }
            if let Some(v) = self.b {
                b = v;
            }
            if let Some(v) = self.c {
                c = v;
            }
            base.state = StateChoice::Custom { a, b, c };
        }
        if let Some(v) = self.seed {
            base.seed = v;
        }
        if let Some(v) = &self.output_path {
            base.output_path = Some(v.clone());
        }
        base
    }

    /// Parses a flat `key=value` UTF-8 config file with `#` comments.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut overlay = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                QError::Inconsistent(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                QError::Inconsistent(format!("config line {}: bad {what} `{value}`", lineno + 1))
            };
            match key {
                "channel" => {
                    overlay.channel = Some(match value {
                        "gad" => ChannelKind::Gad,
                        _ => return Err(bad("channel")),
                    })
                }
                "omega" => overlay.omega = Some(value.parse().map_err(|_| bad("omega"))?),
                "tc" | "t_c" => overlay.t_c = Some(value.parse().map_err(|_| bad("tc"))?),
                "t_end" => overlay.t_end = Some(value.parse().map_err(|_| bad("t_end"))?),
                "steps" => overlay.steps = Some(value.parse().map_err(|_| bad("steps"))?),
                "state" => {
                    overlay.state = Some(match value {
                        "bell" => StateChoice::Bell,
                        "paper" => StateChoice::Paper,
                        "custom" => StateChoice::Custom {
                            a: 0.0,
                            b: 0.0,
                            c: 0.0,
                        },
                        _ => return Err(bad("state")),
                    })
                }
                "a" => overlay.a = Some(value.parse().map_err(|_| bad("a"))?),
                "b" => overlay.b = Some(value.parse().map_err(|_| bad("b"))?),
                "c" => overlay.c = Some(value.parse().map_err(|_| bad("c"))?),
                "seed" => overlay.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "out" | "output" => overlay.output_path = Some(value.to_string()),
                other => {
                    return Err(QError::Inconsistent(format!(
                        "config line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(overlay)
    }
}

/// One sampled row of the full trajectory table.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryRow {
    pub t: f64,
    pub eof: f64,
    pub mi: f64,
    pub j_ae: f64,
    pub delta_ae: f64,
    pub i_ae: f64,
}

/// Samples all five functionals at every grid point, in parallel with
/// index-ordered reduction.
pub fn sample_trajectories(
    config: &RunConfig,
) -> Result<Vec<TrajectoryRow>> {
    config.validate()?;
    let channel = config.channel()?;
    let grid = config.grid()?;
    let rho0 = config.initial_state()?.density();
    (0..=grid.steps)
        .into_par_iter()
        .map(|k| {
            let t = grid.time(k);
            let rho_t = apply_to_system(&crate::channels::DynamicalMap::at(&channel, t)?, &rho0)?;
            let breakdown = info_breakdown_ae(&rho_t)?;
            Ok(TrajectoryRow {
                t,
                eof: eof(&rho_t)?,
                mi: mutual_information_sa(&rho_t)?,
                j_ae: breakdown.j_ae,
                delta_ae: breakdown.delta_ae,
                i_ae: breakdown.i_ae,
            })
        })
        .collect()
}

/// 12-significant-digit scientific formatting; locale-independent.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

pub const CSV_HEADER: &str = "t,eof,mi,j_ae,delta_ae,i_ae";

/// Renders the trajectory table as CSV, line-feed terminated.
pub fn render_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 96 + 32);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_value(r.t),
            format_value(r.eof),
            format_value(r.mi),
            format_value(r.j_ae),
            format_value(r.delta_ae),
            format_value(r.i_ae)
        );
    }
    out
}

/// A maximal run of grid intervals sharing one sign triple
/// (dJ, dδ, dI) of the ancilla-environment information flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub signs: (i8, i8, i8),
    pub t_start: f64,
    pub t_end: f64,
}

fn sign_with_tol(x: f64) -> i8 {
    if x > REGION_SIGN_TOL {
        1
    } else if x < -REGION_SIGN_TOL {
        -1
    } else {
        0
    }
}

/// Classifies the finite-difference sign triples of (J, δ, I) on grid
/// intervals up to the cutoff time, skipping the initial transient where δ
/// has not yet grown past the noise floor, and merging adjacent intervals
/// of equal class.
pub fn detect_regions(rows: &[TrajectoryRow], t_c: f64) -> Vec<Region> {
    let mut regions: Vec<Region> = Vec::new();
    let mut past_transient = false;
    for w in rows.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi.t > t_c + REGION_SIGN_TOL {
            break;
        }
        if !past_transient {
            if lo.delta_ae < REGION_TRANSIENT_TOL {
                continue;
            }
            past_transient = true;
        }
        let signs = (
            sign_with_tol(hi.j_ae - lo.j_ae),
            sign_with_tol(hi.delta_ae - lo.delta_ae),
            sign_with_tol(hi.i_ae - lo.i_ae),
        );
        match regions.last_mut() {
            Some(last) if last.signs == signs => last.t_end = hi.t,
            _ => regions.push(Region {
                signs,
                t_start: lo.t,
                t_end: hi.t,
            }),
        }
    }
    regions
}

/// The expected temporal succession of information-flow regimes: all three
/// quantities rising; then δ falling while the total still rises; then the
/// total falling as the δ decay overtakes the J growth.
pub const REGION_PATTERN: [(i8, i8, i8); 3] = [(1, 1, 1), (1, -1, 1), (1, -1, -1)];

/// Index into `regions` where the three-regime pattern starts, if the
/// pattern occurs consecutively in temporal order.
pub fn find_region_pattern(regions: &[Region]) -> Option<usize> {
    regions
        .windows(REGION_PATTERN.len())
        .position(|w| {
            w.iter()
                .zip(REGION_PATTERN.iter())
                .all(|(r, p)| r.signs == *p)
        })
}

/// Renders the detected regions as CSV.
pub fn render_regions_csv(regions: &[Region]) -> String {
    let mut out = String::from("region,dj_sign,ddelta_sign,di_sign,t_start,t_end\n");
    for (k, r) in regions.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            k,
            r.signs.0,
            r.signs.1,
            r.signs.2,
            format_value(r.t_start),
            format_value(r.t_end)
        );
    }
    out
}

/// Ready-to-run gnuplot script plotting the named columns of a CSV.
pub fn gnuplot_script(csv_path: &Path, columns: &[(usize, &str)], title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set key autotitle columnhead");
    let _ = writeln!(out, "set xlabel 'dimensionless time'");
    let _ = writeln!(out, "set title '{title}'");
    let mut parts = Vec::new();
    for (col, label) in columns {
        parts.push(format!(
            "'{}' using 1:{} with lines title '{}'",
            csv_path.display(),
            col,
            label
        ));
    }
    let _ = writeln!(out, "plot {}", parts.join(", \\\n     "));
    let _ = writeln!(out, "pause -1");
    out
}
