//! Library side of the `coherence` CLI: run configuration, the
//! `name:key=value` spec grammar, CSV figure emitters and JSON reports.
//!
//! All emitted files are deterministic: the same configuration produces
//! byte-identical output. Reals are printed with 12 significant digits in
//! scientific notation, and every file records the truncation tolerance,
//! log base and artifact version.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use coherence_core::gaussian::covariance_matrix;
use coherence_core::measures::{
    entropy_error_bar, g2_zero, l1_coherence_dense, l1_coherence_pure, l1_from_distribution,
    max_rel_ent_coherence_multimode, rel_ent_coherence, shannon_entropy, von_neumann_entropy,
    LogBase,
};
use coherence_core::optimize::{
    maximize_entropy_mean_constraint, maximize_l1_mean_constraint,
    maximize_l1_two_moment_constraint, OptimizationReport,
};
use coherence_core::states::multimode_max_coherent;
use coherence_core::states::{
    coherent, pstd, squeezed, squeezed_vacuum, thermal, tmsv, tmsv_through_bs, two_mode_coherent,
    PhaseRule, TruncationPolicy,
};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error at position {pos}: {msg}")]
    Usage { pos: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] coherence_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage(pos: usize, msg: impl Into<String>) -> CliError {
    CliError::Usage {
        pos,
        msg: msg.into(),
    }
}

/// Inclusive arithmetic grid over mean photon numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            start: 0.05,
            stop: 5.0,
            step: 0.05,
        }
    }
}

impl Grid {
    /// Parse `start:stop:step`.
    pub fn parse(s: &str) -> Result<Grid> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(0, format!("grid must be start:stop:step, got `{s}`")));
        }
        let mut vals = [0.0f64; 3];
        let mut offset = 0;
        for (i, part) in parts.iter().enumerate() {
            vals[i] = part
                .parse::<f64>()
                .map_err(|e| usage(offset, format!("bad grid number `{part}`: {e}")))?;
            offset += part.len() + 1;
        }
        let g = Grid {
            start: vals[0],
            stop: vals[1],
            step: vals[2],
        };
        if !g.start.is_finite()
            || g.start < 0.0
            || !g.step.is_finite()
            || g.step <= 0.0
            || g.stop < g.start
        {
            return Err(usage(
                0,
                format!("grid needs start >= 0, step > 0, stop >= start, got `{s}`"),
            ));
        }
        Ok(g)
    }

    /// Grid points start + i·step (multiplication, so no accumulation drift).
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Shared run configuration for every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tol: f64,
    pub log_base: LogBase,
    pub grid: Grid,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: 1e-12,
            log_base: LogBase::Natural,
            grid: Grid::default(),
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy {
            tol: self.tol,
            ..Default::default()
        }
    }

    fn config_comment(&self) -> String {
        format!(
            "# config: tol={:e} log_base={} version={}",
            self.tol,
            self.log_base.label(),
            ARTIFACT_VERSION
        )
    }
}

/// 12-significant-digit scientific notation.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

// ---------------------------------------------------------------------------
// spec grammar: name:key=value[,key=value...]
// ---------------------------------------------------------------------------

/// Parsed `name:key=value,...` spec with byte positions for error reporting.
#[derive(Debug, Clone)]
pub struct Spec {
    pub name: String,
    keys: Vec<(String, String, usize)>, // key, raw value, value position
}

impl Spec {
    pub fn parse(input: &str) -> Result<Spec> {
        if input.is_empty() {
            return Err(usage(0, "empty spec"));
        }
        let (name, rest_pos) = match input.find(':') {
            Some(i) => (&input[..i], i + 1),
            None => (input, input.len()),
        };
        if name.is_empty() {
            return Err(usage(0, "missing state or problem name"));
        }
        if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(usage(0, format!("invalid name `{name}`")));
        }
        let mut keys = Vec::new();
        let mut pos = rest_pos;
        if rest_pos < input.len() {
            for field in input[rest_pos..].split(',') {
                let eq = field
                    .find('=')
                    .ok_or_else(|| usage(pos, format!("expected key=value, got `{field}`")))?;
                let key = &field[..eq];
                let value = &field[eq + 1..];
                if key.is_empty() {
                    return Err(usage(pos, "empty key"));
                }
                if value.is_empty() {
                    return Err(usage(pos + eq + 1, format!("empty value for `{key}`")));
                }
                keys.push((key.to_string(), value.to_string(), pos + eq + 1));
                pos += field.len() + 1;
            }
        }
        Ok(Spec {
            name: name.to_string(),
            keys,
        })
    }

    fn raw(&self, key: &str) -> Option<(&str, usize)> {
        self.keys
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, p)| (v.as_str(), *p))
    }

    pub fn real(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, p)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|e| usage(p, format!("bad real for `{key}`: {e}"))),
        }
    }

    pub fn require_real(&self, key: &str) -> Result<f64> {
        self.real(key)?
            .ok_or_else(|| usage(0, format!("`{}` requires key `{key}`", self.name)))
    }

    pub fn integer(&self, key: &str) -> Result<Option<u64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, p)) => v
                .parse::<u64>()
                .map(Some)
                .map_err(|e| usage(p, format!("bad integer for `{key}`: {e}"))),
        }
    }

    pub fn complex(&self, key: &str) -> Result<Option<Complex64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, p)) => parse_complex(v).map(Some).map_err(|off| {
                usage(
                    p + off,
                    format!("bad complex for `{key}`: expected re, imi or re+imi"),
                )
            }),
        }
    }

    /// Reject unknown keys so typos surface instead of being ignored.
    pub fn allow_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _, p) in &self.keys {
            if !allowed.iter().any(|a| a == k) {
                return Err(usage(
                    p - k.len() - 1,
                    format!(
                        "unknown key `{k}` for `{}` (allowed: {})",
                        self.name,
                        allowed.join(", ")
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Parse `re`, `imi`, or `re+imi` (e.g. `1.5`, `-0.5i`, `1-0.5i`).
/// On failure returns the byte offset of the problem inside the value.
fn parse_complex(s: &str) -> std::result::Result<Complex64, usize> {
    let body = s.trim();
    if body.is_empty() {
        return Err(0);
    }
    if let Some(stripped) = body.strip_suffix('i') {
        // split at the last +/- that is not a leading sign or exponent sign
        let bytes = stripped.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(i) => (&stripped[..i], &stripped[i..]),
            None => ("", stripped),
        };
        let re = if re_str.is_empty() {
            0.0
        } else {
            re_str.parse::<f64>().map_err(|_| 0usize)?
        };
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().map_err(|_| split.unwrap_or(0))?,
        };
        Ok(Complex64::new(re, im))
    } else {
        body.parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| 0usize)
    }
}

// ---------------------------------------------------------------------------
// figure emitters
// ---------------------------------------------------------------------------

/// Photon-number distributions of the three reference states at one mean.
pub fn write_fig1a(out: &mut dyn Write, cfg: &RunConfig, nbar: f64) -> Result<()> {
    let policy = cfg.policy();
    let p_pstd = pstd(nbar, PhaseRule::Zero, &policy)?.number_distribution();
    let p_coh = coherent(Complex64::new(nbar.sqrt(), 0.0), &policy)?.number_distribution();
    let p_sv = squeezed(Complex64::new(0.0, 0.0), nbar.sqrt().asinh(), 0.0, &policy)?;

    writeln!(out, "n,p_pstd,p_coherent,p_squeezed_vacuum")?;
    writeln!(out, "{}", cfg.config_comment())?;
    let rows = p_pstd.len().max(p_coh.len()).max(p_sv.len());
    let at = |d: &coherence_core::NumberDistribution, n: usize| -> f64 {
        d.probs().get(n).copied().unwrap_or(0.0)
    };
    for n in 0..rows {
        writeln!(
            out,
            "{n},{},{},{}",
            fmt_real(at(&p_pstd, n)),
            fmt_real(at(&p_coh, n)),
            fmt_real(at(&p_sv, n))
        )?;
    }
    Ok(())
}

/// Relative entropy of coherence of the three reference states over the grid.
pub fn write_fig1b(out: &mut dyn Write, cfg: &RunConfig) -> Result<()> {
    let policy = cfg.policy();
    writeln!(out, "nbar,c_pstd,c_coherent,c_squeezed_vacuum,log_base")?;
    writeln!(out, "{}", cfg.config_comment())?;
    for nbar in cfg.grid.points() {
        let c_pstd = rel_ent_coherence(&pstd(nbar, PhaseRule::Zero, &policy)?, cfg.log_base)?;
        let c_coh = rel_ent_coherence(
            &coherent(Complex64::new(nbar.sqrt(), 0.0), &policy)?,
            cfg.log_base,
        )?;
        let sv = squeezed(Complex64::new(0.0, 0.0), nbar.sqrt().asinh(), 0.0, &policy)?;
        let c_sv = shannon_entropy(&sv, cfg.log_base);
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_real(nbar),
            fmt_real(c_pstd),
            fmt_real(c_coh),
            fmt_real(c_sv),
            cfg.log_base.label()
        )?;
    }
    Ok(())
}

/// det γ of the three reference states over the grid.
pub fn write_fig1c(out: &mut dyn Write, cfg: &RunConfig) -> Result<()> {
    let policy = cfg.policy();
    writeln!(out, "nbar,det_pstd,det_coherent,det_squeezed_vacuum")?;
    writeln!(out, "{}", cfg.config_comment())?;
    for nbar in cfg.grid.points() {
        let d_pstd = covariance_matrix(&pstd(nbar, PhaseRule::Zero, &policy)?).det();
        let d_coh = covariance_matrix(&coherent(Complex64::new(nbar.sqrt(), 0.0), &policy)?).det();
        let d_sv = covariance_matrix(&squeezed_vacuum(nbar.sqrt().asinh(), &policy)?).det();
        writeln!(
            out,
            "{},{},{},{}",
            fmt_real(nbar),
            fmt_real(d_pstd),
            fmt_real(d_coh),
            fmt_real(d_sv)
        )?;
    }
    Ok(())
}

/// Maximal coherence over the grid for mode counts 1..=d_max.
pub fn write_fig2a(out: &mut dyn Write, cfg: &RunConfig, d_max: u32) -> Result<()> {
    if d_max < 1 {
        return Err(usage(0, "d-max must be >= 1"));
    }
    let header: Vec<String> = (1..=d_max).map(|d| format!("c_d{d}")).collect();
    writeln!(out, "nbar_t,{}", header.join(","))?;
    writeln!(out, "{}", cfg.config_comment())?;
    for nbar_t in cfg.grid.points() {
        let cols: Vec<String> = (1..=d_max)
            .map(|d| fmt_real(max_rel_ent_coherence_multimode(d, nbar_t, cfg.log_base)))
            .collect();
        writeln!(out, "{},{}", fmt_real(nbar_t), cols.join(","))?;
    }
    Ok(())
}

/// Two-mode comparison over the grid: maximal state, product coherent state,
/// two-mode squeezed vacuum, and the squeezed vacuum through the splitter.
pub fn write_fig2b(out: &mut dyn Write, cfg: &RunConfig) -> Result<()> {
    let policy = cfg.policy();
    writeln!(out, "nbar_t,c_max2,c_two_mode_coherent,c_tmsv,c_tmsv_bs")?;
    writeln!(out, "{}", cfg.config_comment())?;
    for nbar_t in cfg.grid.points() {
        let c_max2 = max_rel_ent_coherence_multimode(2, nbar_t, cfg.log_base);
        let alpha = Complex64::new((nbar_t / 2.0).sqrt(), 0.0);
        let c_tmc = rel_ent_coherence(&two_mode_coherent(alpha, &policy)?, cfg.log_base)?;
        let c_tmsv = rel_ent_coherence(&tmsv(nbar_t, &policy)?, cfg.log_base)?;
        let c_bs = rel_ent_coherence(&tmsv_through_bs(nbar_t, &policy)?, cfg.log_base)?;
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_real(nbar_t),
            fmt_real(c_max2),
            fmt_real(c_tmc),
            fmt_real(c_tmsv),
            fmt_real(c_bs)
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// measure
// ---------------------------------------------------------------------------

/// Flat per-run report for `measure`.
#[derive(Debug, Serialize)]
pub struct MeasureReport {
    pub state: String,
    pub log_base: &'static str,
    pub tol: f64,
    pub version: &'static str,
    pub rel_ent_coherence: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1_coherence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2_zero: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub von_neumann_entropy: Option<f64>,
    pub mean_n: f64,
    pub tail_bound: f64,
    pub entropy_error_bar: f64,
}

/// Evaluate the measures for a state spec (see the grammar in the README).
pub fn run_measure(spec_text: &str, cfg: &RunConfig, want_g2: bool) -> Result<MeasureReport> {
    let spec = Spec::parse(spec_text)?;
    let policy = cfg.policy();
    let base = cfg.log_base;
    let g2_unsupported = |name: &str| -> CliError {
        usage(
            0,
            format!("--g2 needs a single-mode amplitude-level state, `{name}` is not"),
        )
    };

    let report = match spec.name.as_str() {
        "pstd" => {
            spec.allow_keys(&["nbar", "phi"])?;
            let nbar = spec.require_real("nbar")?;
            let phases = match spec.real("phi")? {
                Some(phi) => PhaseRule::Linear(phi),
                None => PhaseRule::Zero,
            };
            let s = pstd(nbar, phases, &policy)?;
            MeasureReport {
                state: spec_text.to_string(),
                log_base: base.label(),
                tol: cfg.tol,
                version: ARTIFACT_VERSION,
                rel_ent_coherence: rel_ent_coherence(&s, base)?,
                l1_coherence: Some(l1_coherence_pure(&s)),
                g2_zero: want_g2.then(|| g2_zero(&s)).transpose()?,
                von_neumann_entropy: None,
                mean_n: s.number_distribution().mean_n(),
                tail_bound: s.tail_bound(),
                entropy_error_bar: entropy_error_bar(s.tail_bound(), base),
            }
        }
        "coherent" => {
            spec.allow_keys(&["alpha"])?;
            let alpha = spec
                .complex("alpha")?
                .ok_or_else(|| usage(0, "`coherent` requires key `alpha`"))?;
            let s = coherent(alpha, &policy)?;
            MeasureReport {
                state: spec_text.to_string(),
                log_base: base.label(),
                tol: cfg.tol,
                version: ARTIFACT_VERSION,
                rel_ent_coherence: rel_ent_coherence(&s, base)?,
                l1_coherence: Some(l1_coherence_pure(&s)),
                g2_zero: want_g2.then(|| g2_zero(&s)).transpose()?,
                von_neumann_entropy: None,
                mean_n: s.number_distribution().mean_n(),
                tail_bound: s.tail_bound(),
                entropy_error_bar: entropy_error_bar(s.tail_bound(), base),
            }
        }
        "squeezed" => {
            spec.allow_keys(&["alpha", "r", "phi"])?;
            let alpha = spec.complex("alpha")?.unwrap_or(Complex64::new(0.0, 0.0));
            let r = spec.require_real("r")?;
            let phi = spec.real("phi")?.unwrap_or(0.0);
            let dist = squeezed(alpha, r, phi, &policy)?;
            let g2 = if want_g2 {
                if alpha == Complex64::new(0.0, 0.0) && phi == 0.0 {
                    Some(g2_zero(&squeezed_vacuum(r, &policy)?)?)
                } else {
                    return Err(g2_unsupported("squeezed with displacement"));
                }
            } else {
                None
            };
            MeasureReport {
                state: spec_text.to_string(),
                log_base: base.label(),
                tol: cfg.tol,
                version: ARTIFACT_VERSION,
                rel_ent_coherence: base.from_nats(shannon_entropy(&dist, LogBase::Natural)),
                l1_coherence: Some(l1_from_distribution(&dist)),
                g2_zero: g2,
                von_neumann_entropy: None,
                mean_n: dist.mean_n(),
                tail_bound: dist.tail_bound(),
                entropy_error_bar: entropy_error_bar(dist.tail_bound(), base),
            }
        }
        "thermal" => {
            spec.allow_keys(&["nbar"])?;
            let nbar = spec.require_real("nbar")?;
            if want_g2 {
                return Err(g2_unsupported("thermal"));
            }
            let rho = thermal(nbar, &policy)?;
            let dist = rho.number_distribution();
            MeasureReport {
                state: spec_text.to_string(),
                log_base: base.label(),
                tol: cfg.tol,
                version: ARTIFACT_VERSION,
                rel_ent_coherence: rel_ent_coherence(&rho, base)?,
                l1_coherence: Some(l1_coherence_dense(&rho)),
                g2_zero: None,
                von_neumann_entropy: Some(von_neumann_entropy(&rho, base)?),
                mean_n: dist.mean_n(),
                tail_bound: dist.tail_bound(),
                entropy_error_bar: entropy_error_bar(dist.tail_bound(), base),
            }
        }
        "tmsv" | "tmsv_bs" => {
            spec.allow_keys(&["nbar_t"])?;
            let nbar_t = spec.require_real("nbar_t")?;
            if want_g2 {
                return Err(g2_unsupported(&spec.name));
            }
            let s = if spec.name == "tmsv" {
                tmsv(nbar_t, &policy)?
            } else {
                tmsv_through_bs(nbar_t, &policy)?
            };
            MeasureReport {
                state: spec_text.to_string(),
                log_base: base.label(),
                tol: cfg.tol,
                version: ARTIFACT_VERSION,
                rel_ent_coherence: rel_ent_coherence(&s, base)?,
                l1_coherence: None,
                g2_zero: None,
                von_neumann_entropy: None,
                mean_n: s.mean_total_photons(),
                tail_bound: s.tail_bound(),
                entropy_error_bar: entropy_error_bar(s.tail_bound(), base),
            }
        }
        "two_mode_coherent" => {
            spec.allow_keys(&["alpha"])?;
            let alpha = spec
                .complex("alpha")?
                .ok_or_else(|| usage(0, "`two_mode_coherent` requires key `alpha`"))?;
            if want_g2 {
                return Err(g2_unsupported("two_mode_coherent"));
            }
            let s = two_mode_coherent(alpha, &policy)?;
            MeasureReport {
                state: spec_text.to_string(),
                log_base: base.label(),
                tol: cfg.tol,
                version: ARTIFACT_VERSION,
                rel_ent_coherence: rel_ent_coherence(&s, base)?,
                l1_coherence: None,
                g2_zero: None,
                von_neumann_entropy: None,
                mean_n: s.mean_total_photons(),
                tail_bound: s.tail_bound(),
                entropy_error_bar: entropy_error_bar(s.tail_bound(), base),
            }
        }
        "multimode_max" => {
            spec.allow_keys(&["d", "nbar_t"])?;
            let d = spec
                .integer("d")?
                .ok_or_else(|| usage(0, "`multimode_max` requires key `d`"))?;
            let nbar_t = spec.require_real("nbar_t")?;
            if want_g2 {
                return Err(g2_unsupported("multimode_max"));
            }
            let dist = multimode_max_coherent(d as u32, nbar_t, &policy)?;
            MeasureReport {
                state: spec_text.to_string(),
                log_base: base.label(),
                tol: cfg.tol,
                version: ARTIFACT_VERSION,
                rel_ent_coherence: shannon_entropy(&dist, base),
                l1_coherence: Some(l1_from_distribution(&dist)),
                g2_zero: None,
                von_neumann_entropy: None,
                mean_n: dist.mean_n(),
                tail_bound: dist.tail_bound(),
                entropy_error_bar: entropy_error_bar(dist.tail_bound(), base),
            }
        }
        other => {
            return Err(usage(
                0,
                format!(
                    "unknown state `{other}` (expected pstd, coherent, squeezed, thermal, \
                     tmsv, tmsv_bs, two_mode_coherent or multimode_max)"
                ),
            ))
        }
    };
    Ok(report)
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

/// Flat per-run report for `optimize`, including the full distribution.
#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub problem: String,
    pub tol: f64,
    pub version: &'static str,
    pub objective: f64,
    pub constraint_residuals: Vec<f64>,
    pub kkt_residual: f64,
    pub multipliers: Vec<f64>,
    pub moment_orders: Vec<u32>,
    pub cutoff: usize,
    pub iterations: usize,
    pub converged: bool,
    pub distribution: Vec<f64>,
}

impl OptimizeReport {
    fn from_report(problem: &str, solver_tol: f64, report: OptimizationReport) -> Self {
        OptimizeReport {
            problem: problem.to_string(),
            tol: solver_tol,
            version: ARTIFACT_VERSION,
            objective: report.objective,
            constraint_residuals: report.constraint_residuals,
            kkt_residual: report.kkt_residual,
            multipliers: report.multipliers,
            moment_orders: report.moment_orders,
            cutoff: report.cutoff,
            iterations: report.iterations,
            converged: report.converged,
            distribution: report.distribution.probs().to_vec(),
        }
    }
}

/// Solve an optimizer problem spec: `max_entropy:nbar=..,cutoff=..`,
/// `l1_mean:nbar=..,cutoff=..` or `l1_two_moment:nbar=..,m2=..,cutoff=..`
/// (each takes an optional `tol`, the solver tolerance, default 1e-9).
pub fn run_optimize(spec_text: &str) -> Result<OptimizeReport> {
    let spec = Spec::parse(spec_text)?;
    let solver_tol = spec.real("tol")?.unwrap_or(1e-9);
    let cutoff = spec
        .integer("cutoff")?
        .ok_or_else(|| usage(0, format!("`{}` requires key `cutoff`", spec.name)))?
        as usize;
    let report =
        match spec.name.as_str() {
            "max_entropy" => {
                spec.allow_keys(&["nbar", "cutoff", "tol"])?;
                let nbar = spec.require_real("nbar")?;
                maximize_entropy_mean_constraint(nbar, cutoff, solver_tol)?
            }
            "l1_mean" => {
                spec.allow_keys(&["nbar", "cutoff", "tol"])?;
                let nbar = spec.require_real("nbar")?;
                maximize_l1_mean_constraint(nbar, cutoff, solver_tol)?
            }
            "l1_two_moment" => {
                spec.allow_keys(&["nbar", "m2", "cutoff", "tol"])?;
                let nbar = spec.require_real("nbar")?;
                let m2 = spec.require_real("m2")?;
                maximize_l1_two_moment_constraint(nbar, m2, cutoff, solver_tol)?
            }
            other => return Err(usage(
                0,
                format!(
                    "unknown problem `{other}` (expected max_entropy, l1_mean or l1_two_moment)"
                ),
            )),
        };
    Ok(OptimizeReport::from_report(spec_text, solver_tol, report))
}

// ---------------------------------------------------------------------------
// report serialization
// ---------------------------------------------------------------------------

/// Serialize a report as pretty JSON or as `key,value` CSV rows.
pub fn write_report<T: Serialize>(out: &mut dyn Write, cfg: &RunConfig, report: &T) -> Result<()> {
    match cfg.format {
        OutputFormat::Json => {
            let json = serde_json::to_string_pretty(report).expect("report serializes");
            writeln!(out, "{json}")?;
        }
        OutputFormat::Csv => {
            writeln!(out, "key,value")?;
            writeln!(out, "{}", cfg.config_comment())?;
            let value = serde_json::to_value(report).expect("report serializes");
            let obj = value.as_object().expect("reports are flat objects");
            for (k, v) in obj {
                match v {
                    serde_json::Value::Array(items) => {
                        let joined: Vec<String> = items.iter().map(|x| x.to_string()).collect();
                        writeln!(out, "{k},{}", joined.join(";"))?;
                    }
                    other => writeln!(out, "{k},{other}")?,
                }
            }
        }
    }
    Ok(())
}
