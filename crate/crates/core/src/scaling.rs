//! Finite-size scaling of the fidelity-susceptibility peak.
//!
//! For each system size the susceptibility along a path `q ↦ base + q·d` is
//! maximized (coarse scan, then golden-section refinement). The peak heights
//! and drifts are fitted to `χ_max ∝ N^α` and `|q_max - q_c| ∝ N^β`, and the
//! width exponent `ν` is the value that best collapses
//! `(χ_max - χ)/χ` against `N^ν (q - q_max)` across sizes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fidelity::{susceptibility_at, Direction};
use crate::model::{Boundary, FibonacciApproximant, ModelPoint};
use crate::output::format_float;

/// Minimum number of coarse-scan points.
pub const MIN_COARSE_POINTS: usize = 21;
/// Points per collapse curve.
pub const CURVE_POINTS: usize = 41;
/// Curves span `q_max ± CURVE_HALF_WIDTHS · (half width)`.
pub const CURVE_HALF_WIDTHS: f64 = 5.0;
/// `α/ν` is flagged when it strays further than this from 2.
pub const RATIO_TOLERANCE: f64 = 0.2;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// One evaluation of the objective along the path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakSample {
    pub chi: f64,
    pub reliable: bool,
}

impl PeakSample {
    pub fn reliable(chi: f64) -> Self {
        Self { chi, reliable: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakResult {
    pub q_max: f64,
    pub chi_max: f64,
    /// Width of the final golden-section bracket.
    pub refinement_width: f64,
    /// False if any sample inside the refined bracket came from an unreliable metric.
    pub reliable: bool,
    pub evaluations: usize,
}

/// Maximizes `objective` over `window` with a coarse scan and golden-section refinement.
pub fn find_peak<F>(objective: F, window: (f64, f64), resolution: f64) -> Result<PeakResult>
where
    F: FnMut(f64) -> Result<PeakSample>,
{
    find_peak_with(objective, window, resolution, MIN_COARSE_POINTS)
}

pub fn find_peak_with<F>(
    mut objective: F,
    window: (f64, f64),
    resolution: f64,
    coarse_points: usize,
) -> Result<PeakResult>
where
    F: FnMut(f64) -> Result<PeakSample>,
{
    let (lo, hi) = window;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("peak window [{lo}, {hi}] is empty")));
    }
    if !(resolution > 0.0) {
        return Err(invalid(format!("resolution must be positive (got {resolution})")));
    }
    if coarse_points < MIN_COARSE_POINTS {
        return Err(invalid(format!(
            "coarse scan needs at least {MIN_COARSE_POINTS} points (got {coarse_points})"
        )));
    }

    let step = (hi - lo) / (coarse_points - 1) as f64;
    let grid: Vec<f64> = (0..coarse_points).map(|i| lo + step * i as f64).collect();
    let mut samples = Vec::with_capacity(coarse_points);
    for &q in &grid {
        samples.push(objective(q)?);
    }
    let mut evaluations = coarse_points;
    let best = argmax(samples.iter().map(|s| s.chi));
    if best == 0 || best == coarse_points - 1 {
        return Err(Error::Bracket { lo, hi, q: grid[best] });
    }

    let mut best_q = grid[best];
    let mut best_chi = samples[best].chi;
    let mut reliable = samples[best - 1..=best + 1].iter().all(|s| s.reliable);

    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    evaluations += 2;
    let track = |q: f64, s: PeakSample, best_q: &mut f64, best_chi: &mut f64| {
        if s.chi > *best_chi {
            *best_chi = s.chi;
            *best_q = q;
        }
    };
    track(c, fc, &mut best_q, &mut best_chi);
    track(d, fd, &mut best_q, &mut best_chi);
    reliable &= fc.reliable && fd.reliable;

    while b - a > resolution {
        if fc.chi >= fd.chi {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = objective(c)?;
            track(c, fc, &mut best_q, &mut best_chi);
            reliable &= fc.reliable;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = objective(d)?;
            track(d, fd, &mut best_q, &mut best_chi);
            reliable &= fd.reliable;
        }
        evaluations += 1;
        if evaluations > 10_000 {
            break;
        }
    }

    Ok(PeakResult {
        q_max: best_q,
        chi_max: best_chi,
        refinement_width: b - a,
        reliable,
        evaluations,
    })
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

/// Distance from the peak to the half-maximum point on one side (`side = ±1`).
///
/// Steps outward by `step` until the objective drops below half the peak, then
/// bisects the crossing in log-distance to a relative precision of `1e-3`.
pub fn half_width_side<F>(
    mut objective: F,
    peak: &PeakResult,
    side: f64,
    step: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<PeakSample>,
{
    let half = 0.5 * peak.chi_max;
    let mut inner = peak.refinement_width.max(f64::EPSILON * peak.q_max.abs().max(1.0));
    if objective(peak.q_max + side * inner)?.chi < half {
        return Ok(inner);
    }
    let mut outer = step;
    let mut expansions = 0;
    while objective(peak.q_max + side * outer)?.chi >= half {
        inner = outer;
        outer *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::NotFound("half-maximum point not found".into()));
        }
    }
    if inner >= outer {
        inner = outer * 0.5;
    }
    while outer / inner > 1.001 {
        let mid = (inner * outer).sqrt();
        if objective(peak.q_max + side * mid)?.chi >= half {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    Ok((inner * outer).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// Natural log of the prefactor.
    pub log_prefactor: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln N, ln y)`.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<PowerLawFit> {
    if pairs.len() < 3 {
        return Err(invalid(format!(
            "power-law fit needs at least 3 points (got {})",
            pairs.len()
        )));
    }
    if let Some(&(n, y)) = pairs.iter().find(|&&(n, y)| !(n > 0.0) || !(y > 0.0)) {
        return Err(invalid(format!(
            "power-law fit needs positive data (got N = {n}, y = {y})"
        )));
    }
    let k = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("power-law fit needs at least two distinct sizes"));
    }
    let exponent = sxy / sxx;
    let log_prefactor = my - exponent * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit { exponent, log_prefactor, r_squared })
}

/// Susceptibility samples `(q, χ)` for one size, with its peak.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingCurve {
    pub size: usize,
    pub peak: PeakResult,
    pub samples: Vec<(f64, f64)>,
}

/// Grid of trial exponents `lo, lo + step, …, hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl NuGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.lo <= self.hi) || !(self.lo > 0.0) {
            return Err(invalid(format!("bad nu grid {self:?}")));
        }
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.lo + self.step * i as f64).collect())
    }
}

impl Default for NuGrid {
    fn default() -> Self {
        Self { lo: 0.2, hi: 4.0, step: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollapseFit {
    pub nu: f64,
    pub residual: f64,
}

const COLLAPSE_GRID: usize = 201;

/// Mean squared spread of the rescaled curves at one trial `ν`.
pub fn collapse_residual(curves: &[ScalingCurve], nu: f64) -> Result<f64> {
    if curves.len() < 2 {
        return Err(invalid("collapse needs at least two system sizes"));
    }
    let rescaled: Vec<Vec<(f64, f64)>> = curves
        .iter()
        .map(|c| {
            let scale = (c.size as f64).powf(nu);
            let mut pts: Vec<(f64, f64)> = c
                .samples
                .iter()
                .map(|&(q, chi)| (scale * (q - c.peak.q_max), (c.peak.chi_max - chi) / chi))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts
        })
        .collect();
    let lo = rescaled
        .iter()
        .map(|p| p.first().map_or(f64::INFINITY, |x| x.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = rescaled
        .iter()
        .map(|p| p.last().map_or(f64::NEG_INFINITY, |x| x.0))
        .fold(f64::INFINITY, f64::min);
    if !(lo < hi) {
        return Err(invalid(format!(
            "rescaled curves do not overlap at nu = {nu}"
        )));
    }
    let k = rescaled.len() as f64;
    let mut total = 0.0;
    for i in 0..COLLAPSE_GRID {
        let x = lo + (hi - lo) * i as f64 / (COLLAPSE_GRID - 1) as f64;
        let ys: Vec<f64> = rescaled.iter().map(|p| interpolate(p, x)).collect();
        let mean = ys.iter().sum::<f64>() / k;
        total += ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / k;
    }
    Ok(total / COLLAPSE_GRID as f64)
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let idx = points.partition_point(|p| p.0 < x);
    if idx == 0 {
        return points[0].1;
    }
    if idx >= points.len() {
        return points[points.len() - 1].1;
    }
    let (x0, y0) = points[idx - 1];
    let (x1, y1) = points[idx];
    if x1 == x0 {
        return y0;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Trial `ν` with the smallest collapse residual.
pub fn collapse_fit(curves: &[ScalingCurve], grid: NuGrid) -> Result<CollapseFit> {
    let mut best: Option<CollapseFit> = None;
    let mut first_err = None;
    for nu in grid.values()? {
        match collapse_residual(curves, nu) {
            Ok(residual) => {
                if best.is_none_or(|b| residual < b.residual) {
                    best = Some(CollapseFit { nu, residual });
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (best, first_err) {
        (Some(b), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => Err(invalid("empty nu grid")),
    }
}

/// Straight path `base + q·direction` through the coupling plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakPath {
    pub base: ModelPoint,
    pub direction: Direction,
}

impl PeakPath {
    pub fn point(&self, q: f64) -> Result<ModelPoint> {
        self.base
            .displaced(self.direction.n_lambda(), self.direction.n_mu(), q)
    }

    pub fn sample(&self, q: f64) -> Result<PeakSample> {
        let s = susceptibility_at(&self.point(q)?, self.direction)?;
        Ok(PeakSample { chi: s.chi, reliable: s.reliable })
    }

    /// Peak search followed by a half-width estimate and 41 curve samples.
    pub fn scaling_curve(&self, window: (f64, f64), resolution: f64) -> Result<(ScalingCurve, f64)> {
        let peak = find_peak(|q| self.sample(q), window, resolution)?;
        let step = (window.1 - window.0) / (MIN_COARSE_POINTS - 1) as f64;
        let left = half_width_side(|q| self.sample(q), &peak, -1.0, step)?;
        let right = half_width_side(|q| self.sample(q), &peak, 1.0, step)?;
        let half_width = 0.5 * (left + right);
        let span = CURVE_HALF_WIDTHS * half_width;
        let mut samples = Vec::with_capacity(CURVE_POINTS);
        for i in 0..CURVE_POINTS {
            let q = peak.q_max - span + 2.0 * span * i as f64 / (CURVE_POINTS - 1) as f64;
            let chi = if i == CURVE_POINTS / 2 {
                peak.chi_max
            } else {
                self.sample(q)?.chi
            };
            samples.push((q, chi));
        }
        let size = self.base.size();
        Ok((ScalingCurve { size, peak, samples }, half_width))
    }
}

/// The transitions with a known critical point on the path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transition {
    /// Metal-metal, across `μ = 1` at `(λ, μ) = (1, 1)` along `μ`.
    MetalMetal,
    /// Metal-insulator, across `λ = 2` at `(2, 0.5)` along `λ`.
    MetalInsulatorI,
    /// Metal-insulator, across `λ = 2μ` at `(3, 1.5)` along `λ`.
    MetalInsulatorIII,
}

impl Transition {
    /// Critical point `(λ_c, μ_c)`; `q = 0` on the path.
    pub fn critical_point(self) -> (f64, f64) {
        match self {
            Transition::MetalMetal => (1.0, 1.0),
            Transition::MetalInsulatorI => (2.0, 0.5),
            Transition::MetalInsulatorIII => (3.0, 1.5),
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Transition::MetalMetal => Direction::MU,
            _ => Direction::LAMBDA,
        }
    }

    /// Coarse-scan window in path coordinates.
    pub fn window(self) -> (f64, f64) {
        (-0.3, 0.3)
    }

    /// Metal-metal sizes split by `m mod 3`; the others are fitted together.
    pub fn default_grouping(self) -> Grouping {
        match self {
            Transition::MetalMetal => Grouping::ByResidue,
            _ => Grouping::Pooled,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Transition::MetalMetal => "mmt",
            Transition::MetalInsulatorI => "mit-i-ii",
            Transition::MetalInsulatorIII => "mit-iii-ii",
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mmt" => Ok(Transition::MetalMetal),
            "mit-i-ii" => Ok(Transition::MetalInsulatorI),
            "mit-iii-ii" => Ok(Transition::MetalInsulatorIII),
            other => Err(invalid(format!(
                "unknown transition '{other}' (expected mmt, mit-i-ii or mit-iii-ii)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grouping {
    ByResidue,
    Pooled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SizeGroup {
    /// `m ≡ 1 (mod 3)`: the bond at `(N-1)/2` breaks at `μ = 1`.
    ResidueOne,
    /// `m ≢ 1 (mod 3)`.
    Other,
    All,
}

impl SizeGroup {
    pub fn classify(m: u32) -> Self {
        if m % 3 == 1 {
            SizeGroup::ResidueOne
        } else {
            SizeGroup::Other
        }
    }

    pub fn contains(self, m: u32) -> bool {
        match self {
            SizeGroup::All => true,
            g => Self::classify(m) == g,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SizeGroup::ResidueOne => "m=3l+1",
            SizeGroup::Other => "m!=3l+1",
            SizeGroup::All => "all",
        }
    }
}

/// Per-size peak data.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeRow {
    pub m: u32,
    pub size: usize,
    pub q_max: f64,
    pub chi_max: f64,
    pub half_width: f64,
    pub reliable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingResult {
    pub transition: Transition,
    pub group: SizeGroup,
    pub rows: Vec<SizeRow>,
    pub alpha: f64,
    /// `NaN` when some peak sits exactly on the critical point.
    pub beta: f64,
    pub nu: f64,
    pub r_squared_alpha: f64,
    pub r_squared_beta: f64,
    pub collapse_residual: f64,
    /// Sign of `q_max - q_c` for each row, in row order.
    pub drift_signs: Vec<f64>,
}

impl ScalingResult {
    pub fn alpha_over_nu(&self) -> f64 {
        self.alpha / self.nu
    }

    /// `|α/ν - 2| > RATIO_TOLERANCE`.
    pub fn ratio_flagged(&self) -> bool {
        !((self.alpha_over_nu() - 2.0).abs() <= RATIO_TOLERANCE)
    }
}

/// Knobs of the scaling pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingOptions {
    pub resolution: f64,
    pub nu_grid: NuGrid,
    pub k_y: f64,
    pub boundary: Boundary,
    pub grouping: Option<Grouping>,
    pub window: Option<(f64, f64)>,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self {
            resolution: 1e-10,
            nu_grid: NuGrid::default(),
            k_y: 0.0,
            boundary: Boundary::default(),
            grouping: None,
            window: None,
        }
    }
}

/// Peak, half-width and collapse curve for one Fibonacci index.
pub fn size_scan(
    transition: Transition,
    m: u32,
    options: &ScalingOptions,
) -> Result<(SizeRow, ScalingCurve)> {
    let (lc, mc) = transition.critical_point();
    let approximant = FibonacciApproximant::new(m)?;
    let base = ModelPoint::new(lc, mc, approximant)?
        .with_ky(options.k_y)?
        .with_boundary(options.boundary);
    let path = PeakPath { base, direction: transition.direction() };
    let window = options.window.unwrap_or_else(|| transition.window());
    let (curve, half_width) = path.scaling_curve(window, options.resolution)?;
    let row = SizeRow {
        m,
        size: approximant.size(),
        q_max: curve.peak.q_max,
        chi_max: curve.peak.chi_max,
        half_width,
        reliable: curve.peak.reliable,
    };
    Ok((row, curve))
}

/// Fits `α`, `β` and `ν` for one group of per-size results.
pub fn fit_group(
    transition: Transition,
    group: SizeGroup,
    data: &[(SizeRow, ScalingCurve)],
    nu_grid: NuGrid,
) -> Result<ScalingResult> {
    let alpha = fit_power_law(
        &data
            .iter()
            .map(|(r, _)| (r.size as f64, r.chi_max))
            .collect::<Vec<_>>(),
    )?;
    // q_c = 0 on every path
    let beta = fit_power_law(
        &data
            .iter()
            .map(|(r, _)| (r.size as f64, r.q_max.abs()))
            .collect::<Vec<_>>(),
    )
    .ok();
    let curves: Vec<ScalingCurve> = data.iter().map(|(_, c)| c.clone()).collect();
    let collapse = collapse_fit(&curves, nu_grid)?;
    Ok(ScalingResult {
        transition,
        group,
        rows: data.iter().map(|(r, _)| r.clone()).collect(),
        alpha: alpha.exponent,
        beta: beta.map_or(f64::NAN, |b| b.exponent),
        nu: collapse.nu,
        r_squared_alpha: alpha.r_squared,
        r_squared_beta: beta.map_or(f64::NAN, |b| b.r_squared),
        collapse_residual: collapse.residual,
        drift_signs: data.iter().map(|(r, _)| r.q_max.signum()).collect(),
    })
}

/// Runs the full pipeline for `transition` over the Fibonacci indices `sizes`.
///
/// Groups with fewer than three sizes are skipped; it is an error if no group
/// can be fitted.
pub fn scaling_report(
    transition: Transition,
    sizes: &[u32],
    options: &ScalingOptions,
) -> Result<Vec<ScalingResult>> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let grouping = options.grouping.unwrap_or(transition.default_grouping());
    let groups: Vec<SizeGroup> = match grouping {
        Grouping::ByResidue => vec![SizeGroup::Other, SizeGroup::ResidueOne],
        Grouping::Pooled => vec![SizeGroup::All],
    };
    let fitted: Vec<SizeGroup> = groups
        .into_iter()
        .filter(|g| sizes.iter().filter(|&&m| g.contains(m)).count() >= 3)
        .collect();
    if fitted.is_empty() {
        return Err(invalid(
            "every size group needs at least three Fibonacci indices",
        ));
    }
    let needed: Vec<u32> = sizes
        .iter()
        .copied()
        .filter(|&m| fitted.iter().any(|g| g.contains(m)))
        .collect();

    let per_size: Vec<(SizeRow, ScalingCurve)> = needed
        .par_iter()
        .map(|&m| size_scan(transition, m, options))
        .collect::<Result<_>>()?;

    fitted
        .into_iter()
        .map(|g| {
            let data: Vec<(SizeRow, ScalingCurve)> = per_size
                .iter()
                .filter(|(r, _)| g.contains(r.m))
                .cloned()
                .collect();
            fit_group(transition, g, &data, options.nu_grid)
        })
        .collect()
}

pub const REPORT_HEADER: &str =
    "group,N,q_max,chi_max,alpha,beta,nu,alpha_over_nu,r2_alpha,r2_beta,collapse_residual";

/// One CSV row per (group, size).
pub fn write_report<W: Write>(out: &mut W, results: &[ScalingResult]) -> Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in results {
        for row in &r.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.group.name(),
                row.size,
                format_float(row.q_max),
                format_float(row.chi_max),
                format_float(r.alpha),
                format_float(r.beta),
                format_float(r.nu),
                format_float(r.alpha_over_nu()),
                format_float(r.r_squared_alpha),
                format_float(r.r_squared_beta),
                format_float(r.collapse_residual),
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentzian(q: f64) -> Result<PeakSample> {
        Ok(PeakSample::reliable(1.0 / ((q - 0.3).powi(2) + 1e-4)))
    }

    #[test]
    fn lorentzian_peak_is_recovered() {
        let peak = find_peak(lorentzian, (0.0, 1.0), 1e-8).unwrap();
        assert!((peak.q_max - 0.3).abs() <= 1e-8);
        assert!(peak.refinement_width <= 1e-8);
        assert!((peak.chi_max - 1e4).abs() < 1e-6);
        assert!(peak.reliable);
    }

    #[test]
    fn edge_maximum_is_a_bracket_error() {
        let r = find_peak(|q| Ok(PeakSample::reliable(q)), (0.0, 1.0), 1e-6);
        assert!(matches!(r, Err(Error::Bracket { .. })));
    }

    #[test]
    fn bad_search_arguments() {
        assert!(find_peak(lorentzian, (1.0, 0.0), 1e-6).is_err());
        assert!(find_peak(lorentzian, (0.0, 1.0), 0.0).is_err());
        assert!(find_peak_with(lorentzian, (0.0, 1.0), 1e-6, 5).is_err());
    }

    #[test]
    fn unreliable_samples_flag_the_peak() {
        let peak = find_peak(
            |q| Ok(PeakSample { chi: 1.0 / ((q - 0.3).powi(2) + 1e-4), reliable: (q - 0.3).abs() > 1e-3 }),
            (0.0, 1.0),
            1e-8,
        )
        .unwrap();
        assert!(!peak.reliable);
    }

    #[test]
    fn lorentzian_half_width() {
        let peak = find_peak(lorentzian, (0.0, 1.0), 1e-10).unwrap();
        for side in [-1.0, 1.0] {
            let hw = half_width_side(lorentzian, &peak, side, 0.05).unwrap();
            assert!((hw - 1e-2).abs() < 2e-5, "{hw}");
        }
    }

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = [55.0, 233.0, 987.0].iter().map(|&n| (n, 5.0 * n * n)).collect();
        let fit = fit_power_law(&pairs).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-10);
        assert!((fit.log_prefactor - 5f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn power_law_rejects_bad_input() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_power_law(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
    }

    fn synthetic_curves(nu_true: f64) -> Vec<ScalingCurve> {
        [55usize, 89, 144, 233]
            .iter()
            .map(|&n| {
                let nf = n as f64;
                let qc = 0.01;
                let width = nf.powf(-nu_true);
                let samples = (0..CURVE_POINTS)
                    .map(|i| {
                        let q = qc - 5.0 * width + 10.0 * width * i as f64 / (CURVE_POINTS - 1) as f64;
                        (q, nf * nf / (1.0 + (nf.powf(nu_true) * (q - qc)).powi(2)))
                    })
                    .collect();
                ScalingCurve {
                    size: n,
                    peak: PeakResult {
                        q_max: qc,
                        chi_max: nf * nf,
                        refinement_width: 0.0,
                        reliable: true,
                        evaluations: 0,
                    },
                    samples,
                }
            })
            .collect()
    }

    #[test]
    fn synthetic_collapse_recovers_nu() {
        let curves = synthetic_curves(1.0);
        let grid = NuGrid { lo: 0.5, hi: 2.0, step: 0.01 };
        let fit = collapse_fit(&curves, grid).unwrap();
        assert!((fit.nu - 1.0).abs() <= grid.step, "{fit:?}");
        let around = |d: f64| collapse_residual(&curves, fit.nu + d).unwrap();
        assert!(fit.residual <= around(2.0 * grid.step));
        assert!(fit.residual <= around(-2.0 * grid.step));
    }

    #[test]
    fn collapse_needs_overlap_and_two_sizes() {
        let curves = synthetic_curves(1.0);
        assert!(collapse_residual(&curves[..1], 1.0).is_err());
        let mut far = curves[..2].to_vec();
        far[1].peak.q_max -= 10.0;
        assert!(collapse_residual(&far, 1.0).is_err());
    }

    #[test]
    fn group_partition() {
        for m in [10, 13, 16] {
            assert_eq!(SizeGroup::classify(m), SizeGroup::ResidueOne);
        }
        for m in [9, 12, 15, 11, 14, 17] {
            assert_eq!(SizeGroup::classify(m), SizeGroup::Other);
        }
        let sizes: Vec<usize> = [10, 13, 16]
            .iter()
            .map(|&m| FibonacciApproximant::new(m).unwrap().size())
            .collect();
        assert_eq!(sizes, vec![89, 377, 1597]);
    }

    #[test]
    fn transition_names_round_trip() {
        for t in [
            Transition::MetalMetal,
            Transition::MetalInsulatorI,
            Transition::MetalInsulatorIII,
        ] {
            assert_eq!(t.name().parse::<Transition>().unwrap(), t);
        }
        assert!("foo".parse::<Transition>().is_err());
    }

    #[test]
    fn nu_grid_values() {
        let v = NuGrid { lo: 0.5, hi: 1.0, step: 0.1 }.values().unwrap();
        assert_eq!(v.len(), 6);
        assert!(NuGrid { lo: 1.0, hi: 0.5, step: 0.1 }.values().is_err());
    }
}
