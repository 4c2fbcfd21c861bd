//! Sweeps over the `(λ, μ)` plane and entropy-based phase labels.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::entropy::{entropy_profile, spectrum_entropy};
use crate::error::{invalid, Error, Result};
use crate::fidelity::{fidelity, fidelity_susceptibility, metric_tensor, Direction};
use crate::model::{Boundary, FibonacciApproximant, ModelPoint};
use crate::output::format_float;
use crate::spectrum::{ground_state, solve, GroundState};

/// `lo, …, hi` in `steps` evenly spaced values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl ParamRange {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        let r = Self { lo, hi, steps };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(invalid(format!("range [{}, {}] is empty", self.lo, self.hi)));
        }
        if self.steps < 2 {
            return Err(invalid(format!("a range needs at least 2 steps (got {})", self.steps)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.steps - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.hi
        } else {
            self.lo + self.spacing() * i as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lambda_range: ParamRange,
    pub mu_range: ParamRange,
    /// Reference couplings `(λ₀, μ₀)` for fidelity maps.
    pub reference: Option<(f64, f64)>,
    /// Path direction for susceptibility maps.
    pub direction: Option<Direction>,
    pub approximant_m: u32,
    pub k_y: f64,
    pub boundary: Boundary,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lambda_range: ParamRange { lo: 0.0, hi: 4.0, steps: 101 },
            mu_range: ParamRange { lo: 0.0, hi: 2.0, steps: 51 },
            reference: None,
            direction: None,
            approximant_m: 15,
            k_y: 0.0,
            boundary: Boundary::default(),
        }
    }
}

impl GridSpec {
    pub fn validate(&self, quantities: &[Quantity]) -> Result<()> {
        self.lambda_range.validate()?;
        self.mu_range.validate()?;
        FibonacciApproximant::new(self.approximant_m)?;
        if quantities.contains(&Quantity::Fidelity) && self.reference.is_none() {
            return Err(invalid("fidelity maps need a reference point"));
        }
        if quantities.contains(&Quantity::Fs) && self.direction.is_none() {
            return Err(invalid("susceptibility maps need a direction"));
        }
        Ok(())
    }

    pub fn point(&self, lambda: f64, mu: f64) -> Result<ModelPoint> {
        ModelPoint::new(lambda, mu, FibonacciApproximant::new(self.approximant_m)?)?
            .with_ky(self.k_y)
            .map(|p| p.with_boundary(self.boundary))
    }

    /// Grid points in row-major `(λ, μ)` order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mus = self.mu_range.values();
        self.lambda_range
            .values()
            .into_iter()
            .flat_map(|l| mus.iter().map(move |&m| (l, m)))
            .collect()
    }

    /// Two grid steps in the coarser direction.
    pub fn boundary_band(&self) -> f64 {
        2.0 * self.lambda_range.spacing().max(self.mu_range.spacing())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Fidelity,
    Fs,
    Gap,
    Entropy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    I,
    II,
    III,
    Boundary,
    Unclassified,
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseLabel::I => "I",
            PhaseLabel::II => "II",
            PhaseLabel::III => "III",
            PhaseLabel::Boundary => "boundary",
            PhaseLabel::Unclassified => "unclassified",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// `⟨E_v⟩` at or above this is metallic.
    pub high: f64,
    /// `⟨E_v⟩` at or below this is insulating.
    pub low: f64,
    /// Distance to a critical line within which a point is labelled boundary.
    pub band: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            high: 0.7,
            low: 0.4,
            band: GridSpec::default().boundary_band(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub lambda: f64,
    pub mu: f64,
    pub fidelity: Option<f64>,
    pub chi_f: Option<f64>,
    pub chi_f_reliable: Option<bool>,
    pub gap: Option<f64>,
    /// Scaled entropy of the ground state.
    pub ground_entropy: Option<f64>,
    /// `Σ z_n²` of the ground state.
    pub ground_ipr: Option<f64>,
    pub spectrum_entropy: Option<f64>,
    pub phase_label: Option<PhaseLabel>,
    /// Set when the point failed; the other fields are then absent.
    pub error: Option<String>,
}

impl DiagnosticsRecord {
    fn empty(lambda: f64, mu: f64) -> Self {
        Self {
            lambda,
            mu,
            fidelity: None,
            chi_f: None,
            chi_f_reliable: None,
            gap: None,
            ground_entropy: None,
            ground_ipr: None,
            spectrum_entropy: None,
            phase_label: None,
            error: None,
        }
    }
}

/// Euclidean distance from `(λ, μ)` to the nearest critical line.
///
/// The lines are `μ = 1` for `λ ≤ 2` (I/III), `λ = 2` for `μ ≤ 1` (I/II) and
/// `λ = 2μ` for `μ ≥ 1` (III/II), meeting at the bicritical point `(2, 1)`.
pub fn boundary_distance(lambda: f64, mu: f64) -> f64 {
    let i_iii = if lambda <= 2.0 {
        (mu - 1.0).abs()
    } else {
        (lambda - 2.0).hypot(mu - 1.0)
    };
    let i_ii = if mu <= 1.0 {
        (lambda - 2.0).abs()
    } else {
        (lambda - 2.0).hypot(mu - 1.0)
    };
    let (dx, dy) = (lambda - 2.0, mu - 1.0);
    let (ux, uy) = (2.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt());
    let t = dx * ux + dy * uy;
    let iii_ii = if t >= 0.0 {
        (dx * uy - dy * ux).abs()
    } else {
        dx.hypot(dy)
    };
    i_iii.min(i_ii).min(iii_ii)
}

/// Label from `⟨E_v⟩` and proximity to the critical lines.
pub fn classify(lambda: f64, mu: f64, spectrum_entropy: f64, t: &Thresholds) -> PhaseLabel {
    if boundary_distance(lambda, mu) <= t.band {
        PhaseLabel::Boundary
    } else if spectrum_entropy >= t.high && mu < 1.0 {
        PhaseLabel::I
    } else if spectrum_entropy >= t.high && mu > 1.0 {
        PhaseLabel::III
    } else if spectrum_entropy <= t.low {
        PhaseLabel::II
    } else {
        PhaseLabel::Unclassified
    }
}

/// Label of a scanned record; `None` without entropy data.
pub fn classify_phase(record: &DiagnosticsRecord, t: &Thresholds) -> Option<PhaseLabel> {
    record
        .spectrum_entropy
        .map(|e| classify(record.lambda, record.mu, e, t))
}

fn diagnose(
    spec: &GridSpec,
    quantities: &[Quantity],
    reference: Option<&GroundState>,
    thresholds: &Thresholds,
    lambda: f64,
    mu: f64,
) -> Result<DiagnosticsRecord> {
    let p = spec.point(lambda, mu)?;
    let es = solve(&p)?;
    let mut rec = DiagnosticsRecord::empty(lambda, mu);
    let ground = ground_state(&es)?;
    if let Some(r) = reference {
        rec.fidelity = Some(fidelity(r, &ground)?);
    }
    if let Some(d) = spec.direction.filter(|_| quantities.contains(&Quantity::Fs)) {
        let g = metric_tensor(&p, &es)?;
        rec.chi_f = Some(fidelity_susceptibility(&g, d));
        rec.chi_f_reliable = Some(g.reliable);
    }
    if quantities.contains(&Quantity::Gap) {
        rec.gap = Some(ground.gap);
    }
    if quantities.contains(&Quantity::Entropy) {
        let profile = entropy_profile(&ground.amplitudes)?;
        rec.ground_entropy = Some(profile.state_entropy_scaled);
        rec.ground_ipr = Some(profile.ipr);
        rec.spectrum_entropy = Some(spectrum_entropy(&es)?.value);
        rec.phase_label = classify_phase(&rec, thresholds);
    }
    Ok(rec)
}

/// One record per grid point, in row-major `(λ, μ)` order.
///
/// Per-point failures are recorded in [`DiagnosticsRecord::error`]; an invalid
/// spec or a failing reference point aborts the scan.
pub fn run_scan(spec: &GridSpec, quantities: &[Quantity]) -> Result<Vec<DiagnosticsRecord>> {
    spec.validate(quantities)?;
    let reference = match spec.reference.filter(|_| quantities.contains(&Quantity::Fidelity)) {
        Some((l0, m0)) => Some(ground_state(&solve(&spec.point(l0, m0)?)?)?),
        None => None,
    };
    let thresholds = Thresholds { band: spec.boundary_band(), ..Thresholds::default() };
    let records = spec
        .points()
        .into_par_iter()
        .map(|(l, m)| {
            diagnose(spec, quantities, reference.as_ref(), &thresholds, l, m).unwrap_or_else(|e| {
                DiagnosticsRecord { error: Some(e.to_string()), ..DiagnosticsRecord::empty(l, m) }
            })
        })
        .collect();
    Ok(records)
}

/// Which coupling is held fixed by [`boundary_locate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fixed {
    Lambda(f64),
    Mu(f64),
}

impl std::str::FromStr for Fixed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| invalid(format!("expected lambda=<v> or mu=<v> (got '{s}')")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad value '{value}'")))?;
        match name.trim() {
            "lambda" => Ok(Fixed::Lambda(v)),
            "mu" => Ok(Fixed::Mu(v)),
            other => Err(invalid(format!("unknown parameter '{other}'"))),
        }
    }
}

/// `|d⟨E_v⟩/dq|` must exceed this for a boundary to count as found.
pub const BOUNDARY_NOISE_FLOOR: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryResult {
    /// Sweep value with the steepest entropy change.
    pub location: f64,
    pub derivative: f64,
    /// `(q, ⟨E_v⟩)` along the sweep.
    pub curve: Vec<(f64, f64)>,
}

/// Sweeps `⟨E_v⟩` across `window` and returns the steepest point.
pub fn boundary_locate(
    fix: Fixed,
    window: (f64, f64),
    step: f64,
    m: u32,
    k_y: f64,
    boundary: Boundary,
) -> Result<BoundaryResult> {
    let (lo, hi) = window;
    if !(lo < hi) || !(step > 0.0) {
        return Err(invalid(format!("bad sweep [{lo}, {hi}] with step {step}")));
    }
    let count = ((hi - lo) / step).round() as usize + 1;
    if count < 3 {
        return Err(invalid("sweep needs at least three points"));
    }
    let approximant = FibonacciApproximant::new(m)?;
    let qs: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = qs
        .par_iter()
        .map(|&q| {
            let (l, mu) = match fix {
                Fixed::Lambda(l) => (l, q),
                Fixed::Mu(mu) => (q, mu),
            };
            let p = ModelPoint::new(l, mu, approximant)?
                .with_ky(k_y)?
                .with_boundary(boundary);
            Ok(spectrum_entropy(&solve(&p)?)?.value)
        })
        .collect::<Result<_>>()?;
    let mut best = 1;
    let mut best_d = 0.0f64;
    for i in 1..count - 1 {
        let d = (values[i + 1] - values[i - 1]) / (qs[i + 1] - qs[i - 1]);
        if d.abs() > best_d.abs() {
            best = i;
            best_d = d;
        }
    }
    if !(best_d.abs() > BOUNDARY_NOISE_FLOOR) {
        return Err(Error::NotFound(format!(
            "no entropy drop in [{lo}, {hi}] (max |slope| {})",
            best_d.abs()
        )));
    }
    Ok(BoundaryResult {
        location: qs[best],
        derivative: best_d,
        curve: qs.into_iter().zip(values).collect(),
    })
}

fn csv_field(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// CSV with the columns of the requested quantities.
///
/// `ground_ipr` is `Σ|ψ_n|⁴`: small for extended states, 1 for a single site.
pub fn write_records<W: Write>(
    out: &mut W,
    records: &[DiagnosticsRecord],
    quantities: &[Quantity],
) -> Result<()> {
    let has = |q| quantities.contains(&q);
    let mut header = vec!["lambda", "mu"];
    if has(Quantity::Fidelity) {
        header.push("fidelity");
    }
    if has(Quantity::Fs) {
        header.extend(["chi_f", "chi_f_reliable"]);
    }
    if has(Quantity::Gap) {
        header.push("gap");
    }
    if has(Quantity::Entropy) {
        header.extend(["ground_entropy", "ground_ipr", "spectrum_entropy", "phase"]);
    }
    header.push("error");
    writeln!(out, "{}", header.join(","))?;
    for r in records {
        let mut row = vec![format_float(r.lambda), format_float(r.mu)];
        if has(Quantity::Fidelity) {
            row.push(opt_float(r.fidelity));
        }
        if has(Quantity::Fs) {
            row.push(opt_float(r.chi_f));
            row.push(r.chi_f_reliable.map(|b| b.to_string()).unwrap_or_default());
        }
        if has(Quantity::Gap) {
            row.push(opt_float(r.gap));
        }
        if has(Quantity::Entropy) {
            row.push(opt_float(r.ground_entropy));
            row.push(opt_float(r.ground_ipr));
            row.push(opt_float(r.spectrum_entropy));
            row.push(r.phase_label.map(|l| l.to_string()).unwrap_or_default());
        }
        row.push(r.error.as_deref().map(csv_field).unwrap_or_default());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
