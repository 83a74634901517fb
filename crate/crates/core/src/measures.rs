//! Non-Markovianity measures and witness conditions.
//!
//! Two measures, three model variants each:
//!
//! * RHP indivisibility rate g(t) — positivity loss of the instantaneous
//!   map; blind to the Lamb shift, sensitive to α, β through the
//!   eigenvalues of the x-y damping block.
//! * BLP backflow rate σ(t) — the time derivative of the trace distance of
//!   an evolving state pair.
//!
//! The full-model σ is evaluated on *propagated* differences; the secular
//! variant uses the closed form in the initial differences; the RWA variant
//! has σ = −γF with the same sign set as g = max(0, −γ), which is why both
//! interval lists are detected from a single series there.

use std::io::Write;

use crate::dynamics::{
    propagate, rwa_decay_rate, rwa_f, BlochVector, SecularIntegrals, Trajectory,
};
use crate::spectral::SpectralParams;
use crate::tcl::{CoefficientSet, CoefficientTrace, Contribution};
use crate::{Error, Result};

/// Which perturbative content of a coefficient set enters a measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parts {
    #[default]
    Totals,
    /// ablation: second-order contributions only
    SecondOnly,
}

impl Parts {
    fn of(&self, c: &Contribution) -> f64 {
        match self {
            Parts::Totals => c.total(),
            Parts::SecondOnly => c.second,
        }
    }
}

/// A pair of initial states for the BLP construction.
#[derive(Debug, Clone, Copy)]
pub struct StatePair {
    pub first: BlochVector,
    pub second: BlochVector,
}

impl StatePair {
    pub fn new(first: BlochVector, second: BlochVector) -> Self {
        StatePair { first, second }
    }

    /// (|1⟩⟨1|, |0⟩⟨0|) — the pair that maximizes the BLP measure here.
    pub fn canonical() -> Self {
        StatePair::new(BlochVector::excited(), BlochVector::ground())
    }

    pub fn delta(&self) -> (f64, f64, f64) {
        (
            self.first.bx - self.second.bx,
            self.first.by - self.second.by,
            self.first.bz - self.second.bz,
        )
    }

    /// excited-population difference a = Δbz/2
    pub fn population_diff(&self) -> f64 {
        (self.first.bz - self.second.bz) / 2.0
    }

    /// coherence-difference modulus |Δρ₀₁| = ½√(Δbx² + Δby²)
    pub fn coherence_diff(&self) -> f64 {
        let (dx, dy, _) = self.delta();
        0.5 * (dx * dx + dy * dy).sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        let (dx, dy, dz) = self.delta();
        dx == 0.0 && dy == 0.0 && dz == 0.0
    }
}

/// D(ρ₁, ρ₂) = ½|b₁ − b₂| for qubit states.
pub fn trace_distance(s1: &BlochVector, s2: &BlochVector) -> f64 {
    let dx = s1.bx - s2.bx;
    let dy = s1.by - s2.by;
    let dz = s1.bz - s2.bz;
    0.5 * (dx * dx + dy * dy + dz * dz).sqrt()
}

fn clip_g(g: f64) -> f64 {
    debug_assert!(g >= -1e-12, "g = {g} below the clip floor");
    g.max(0.0)
}

/// Indivisibility rate of the full model from the rates and the
/// nonsecular pair. The Lamb shifts never enter.
pub fn rhp_g_full(c: &CoefficientSet) -> f64 {
    rhp_g_full_parts(c, Parts::Totals)
}

pub fn rhp_g_full_parts(c: &CoefficientSet, parts: Parts) -> f64 {
    let gm = parts.of(&c.gamma_minus);
    let gp = parts.of(&c.gamma_plus);
    let g0 = parts.of(&c.gamma_zero);
    let al = parts.of(&c.alpha);
    let be = parts.of(&c.beta);
    let gsum = gm + gp;
    let r = ((gm - gp) * (gm - gp) + 4.0 * (al * al + be * be)).sqrt();
    clip_g(0.25 * ((gsum + r).abs() + (gsum - r).abs()) + 0.25 * (g0.abs() - g0 - 2.0 * gsum))
}

/// Indivisibility rate with the nonsecular pair dropped.
pub fn rhp_g_secular(c: &CoefficientSet) -> f64 {
    rhp_g_secular_parts(c, Parts::Totals)
}

pub fn rhp_g_secular_parts(c: &CoefficientSet, parts: Parts) -> f64 {
    let gm = parts.of(&c.gamma_minus);
    let gp = parts.of(&c.gamma_plus);
    let g0 = parts.of(&c.gamma_zero);
    clip_g(0.25 * (2.0 * gm.abs() + 2.0 * gp.abs() + g0.abs() - 2.0 * gm - 2.0 * gp - g0))
}

/// Indivisibility rate of the rotating-wave model: max(0, −γ(t)).
pub fn rhp_g_rwa(t: f64, params: &SpectralParams) -> Result<f64> {
    let (gamma, _) = rwa_decay_rate(t, params)?;
    Ok((-gamma).max(0.0))
}

/// Backflow rate of the full model on the *propagated* differences at
/// time t.
pub fn blp_sigma_full(delta: (f64, f64, f64), c: &CoefficientSet) -> Result<f64> {
    blp_sigma_full_parts(delta, c, Parts::Totals)
}

pub fn blp_sigma_full_parts(
    delta: (f64, f64, f64),
    c: &CoefficientSet,
    parts: Parts,
) -> Result<f64> {
    let (dx, dy, dz) = delta;
    let norm = (dx * dx + dy * dy + dz * dz).sqrt();
    if norm == 0.0 {
        return Err(Error::DegeneratePair);
    }
    let gsum = parts.of(&c.gamma_minus) + parts.of(&c.gamma_plus);
    let g0 = parts.of(&c.gamma_zero);
    let al = parts.of(&c.alpha);
    let be = parts.of(&c.beta);
    Ok(-0.25 / norm
        * ((gsum + g0 - 2.0 * al) * dx * dx
            + (gsum + g0 + 2.0 * al) * dy * dy
            + 4.0 * be * dx * dy
            + 2.0 * gsum * dz * dz))
}

/// Backflow rate of the secular closed form, from the *initial*
/// differences and the accumulated Θ, Λ.
pub fn blp_sigma_secular(
    pair: &StatePair,
    integrals: &SecularIntegrals,
    c: &CoefficientSet,
) -> Result<f64> {
    if pair.is_degenerate() {
        return Err(Error::DegeneratePair);
    }
    let (dx0, dy0, dz0) = pair.delta();
    let t = c.t;
    let e2theta = (-2.0 * integrals.theta(t)?).exp();
    let e2lambda = (-2.0 * integrals.lambda(t)?).exp();
    let perp2 = dx0 * dx0 + dy0 * dy0;
    let weight = (e2theta * perp2 + e2lambda * dz0 * dz0).sqrt();
    if weight == 0.0 {
        // fully damped pair: distance identically zero from here on
        return Ok(0.0);
    }
    let gsum = c.gamma_minus.total() + c.gamma_plus.total();
    let g0 = c.gamma_zero.total();
    Ok(-0.25 / weight * (e2theta * (gsum + g0) * perp2 + 2.0 * e2lambda * gsum * dz0 * dz0))
}

/// Backflow rate of the rotating-wave model: σ = −γ(t)·F(t).
pub fn blp_sigma_rwa(t: f64, params: &SpectralParams, pair: &StatePair) -> Result<f64> {
    let a = pair.population_diff();
    let b = pair.coherence_diff();
    let (gamma, _) = rwa_decay_rate(t, params)?;
    let (f, degenerate) = rwa_f(t, params, a, b)?;
    if degenerate {
        return Err(Error::DegeneratePair);
    }
    Ok(-gamma * f)
}

/// Maximal intervals where `values > tol`, boundaries located by linear
/// interpolation between adjacent grid points.
pub fn detect_intervals(grid: &[f64], values: &[f64], tol: f64) -> Vec<(f64, f64)> {
    assert_eq!(grid.len(), values.len(), "series/grid length mismatch");
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let crossing = |i: usize| -> f64 {
        // linear interpolation of the tol crossing inside (grid[i], grid[i+1])
        let (v0, v1) = (values[i], values[i + 1]);
        grid[i] + (tol - v0) / (v1 - v0) * (grid[i + 1] - grid[i])
    };
    for (i, &value) in values.iter().enumerate() {
        let above = value > tol;
        match (above, start) {
            (true, None) => {
                start = Some(if i == 0 { grid[0] } else { crossing(i - 1) });
            }
            (false, Some(s)) => {
                out.push((s, crossing(i - 1)));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, *grid.last().unwrap()));
    }
    out
}

/// The three witness inequalities at one instant, plus the implication
/// `backflow ⇒ indivisible` that must never be violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionFlags {
    /// Γ₋ + Γ₊ + Γ₀ < 0 (backflow for pairs with a transverse difference)
    pub backflow_sum3: bool,
    /// Γ₋ + Γ₊ < 0 (backflow for pairs with a longitudinal difference)
    pub backflow_sum2: bool,
    /// any of Γ₋, Γ₊, Γ₀ < 0 (indivisibility)
    pub indivisible_any: bool,
    pub implication_ok: bool,
}

pub fn check_conditions(c: &CoefficientSet) -> ConditionFlags {
    let gm = c.gamma_minus.total();
    let gp = c.gamma_plus.total();
    let g0 = c.gamma_zero.total();
    let backflow_sum3 = gm + gp + g0 < 0.0;
    let backflow_sum2 = gm + gp < 0.0;
    let indivisible_any = gm < 0.0 || gp < 0.0 || g0 < 0.0;
    ConditionFlags {
        backflow_sum3,
        backflow_sum2,
        indivisible_any,
        implication_ok: !(backflow_sum3 || backflow_sum2) || indivisible_any,
    }
}

/// Model variant of a measure trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Full,
    Secular,
    Rwa,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Variant::Full),
            "secular" => Ok(Variant::Secular),
            "rwa" => Ok(Variant::Rwa),
            other => Err(Error::InvalidParams(format!(
                "unknown variant '{other}' (expected full, secular or rwa)"
            ))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Full => "full",
            Variant::Secular => "secular",
            Variant::Rwa => "rwa",
        })
    }
}

/// Controls for [`measure_trace`].
#[derive(Debug, Clone, Copy)]
pub struct MeasureOptions {
    pub pair: StatePair,
    /// evaluate g and σ from second-order contributions only (ablation);
    /// the full-variant trajectories still follow the trace as given
    pub parts: Parts,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            pair: StatePair::canonical(),
            parts: Parts::Totals,
        }
    }
}

/// g(t), σ(t) and their interval lists on a common grid.
#[derive(Debug, Clone)]
pub struct MeasureTrace {
    pub variant: Variant,
    pub grid: Vec<f64>,
    pub g: Vec<f64>,
    pub sigma: Vec<f64>,
    /// indivisible dynamical intervals: g > tol
    pub idi: Vec<(f64, f64)>,
    /// information-backflow intervals: σ > tol
    pub ibi: Vec<(f64, f64)>,
    /// positivity threshold used for interval detection
    pub tol: f64,
}

/// Evaluates the chosen variant's measures over the trace grid.
///
/// The full variant propagates both pair states with the complete
/// generator and differentiates nothing: σ comes from the closed rate
/// expression on the propagated differences.
pub fn measure_trace(
    trace: &CoefficientTrace,
    variant: Variant,
    opts: &MeasureOptions,
) -> Result<MeasureTrace> {
    if opts.pair.is_degenerate() {
        return Err(Error::DegeneratePair);
    }
    let grid = trace.grid.clone();
    let tol = 1e-9 * trace.max_rate_magnitude();
    match variant {
        Variant::Full => {
            let tmax = trace.tmax();
            let t1 = propagate(opts.pair.first, trace, tmax)?;
            let t2 = propagate(opts.pair.second, trace, tmax)?;
            let mut g = Vec::with_capacity(grid.len());
            let mut sigma = Vec::with_capacity(grid.len());
            for (i, set) in trace.sets.iter().enumerate() {
                g.push(rhp_g_full_parts(set, opts.parts));
                let d = (
                    t1.states[i].bx - t2.states[i].bx,
                    t1.states[i].by - t2.states[i].by,
                    t1.states[i].bz - t2.states[i].bz,
                );
                sigma.push(blp_sigma_full_parts(d, set, opts.parts)?);
            }
            let idi = detect_intervals(&grid, &g, tol);
            let ibi = detect_intervals(&grid, &sigma, tol);
            Ok(MeasureTrace {
                variant,
                grid,
                g,
                sigma,
                idi,
                ibi,
                tol,
            })
        }
        Variant::Secular => {
            let integrals = SecularIntegrals::from_trace(trace);
            let mut g = Vec::with_capacity(grid.len());
            let mut sigma = Vec::with_capacity(grid.len());
            for set in &trace.sets {
                g.push(rhp_g_secular_parts(set, opts.parts));
                sigma.push(blp_sigma_secular(&opts.pair, &integrals, set)?);
            }
            let idi = detect_intervals(&grid, &g, tol);
            let ibi = detect_intervals(&grid, &sigma, tol);
            Ok(MeasureTrace {
                variant,
                grid,
                g,
                sigma,
                idi,
                ibi,
                tol,
            })
        }
        Variant::Rwa => measure_trace_rwa(&trace.params, &grid, opts),
    }
}

/// RWA measures need no coefficient trace — only the spectral parameters.
///
/// σ = −γF and g = max(0, −γ) share the sign set {γ < 0}; the crossing is
/// detected once on −γ so the IDI and IBI lists are identical by
/// construction — a model-level identity, not an approximation.
pub fn measure_trace_rwa(
    params: &SpectralParams,
    grid: &[f64],
    opts: &MeasureOptions,
) -> Result<MeasureTrace> {
    let pair = &opts.pair;
    if pair.is_degenerate() {
        return Err(Error::DegeneratePair);
    }
    let mut g = Vec::with_capacity(grid.len());
    let mut sigma = Vec::with_capacity(grid.len());
    let mut neg_gamma = Vec::with_capacity(grid.len());
    for &t in grid {
        let (gamma, _) = rwa_decay_rate(t, params)?;
        neg_gamma.push(-gamma);
        g.push((-gamma).max(0.0));
        sigma.push(blp_sigma_rwa(t, params, pair)?);
    }
    let gamma_scale = neg_gamma.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * gamma_scale;
    let intervals = detect_intervals(grid, &neg_gamma, tol);
    Ok(MeasureTrace {
        variant: Variant::Rwa,
        grid: grid.to_vec(),
        g,
        sigma,
        idi: intervals.clone(),
        ibi: intervals,
        tol,
    })
}

impl MeasureTrace {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,g,sigma,in_idi,in_ibi")?;
        for i in 0..self.grid.len() {
            let in_idi = self
                .idi
                .iter()
                .any(|&(a, b)| self.grid[i] >= a && self.grid[i] <= b);
            let in_ibi = self
                .ibi
                .iter()
                .any(|&(a, b)| self.grid[i] >= a && self.grid[i] <= b);
            writeln!(
                w,
                "{},{},{},{},{}",
                self.grid[i], self.g[i], self.sigma[i], in_idi as u8, in_ibi as u8
            )?;
        }
        Ok(())
    }

    /// Interval lists as a JSON object of [start, end] pairs.
    pub fn intervals_json(&self) -> String {
        let pairs =
            |v: &[(f64, f64)]| -> Vec<[f64; 2]> { v.iter().map(|&(a, b)| [a, b]).collect() };
        serde_json::json!({
            "variant": self.variant.to_string(),
            "idi": pairs(&self.idi),
            "ibi": pairs(&self.ibi),
        })
        .to_string()
    }
}

/// (N_blp, I_rhp): σ integrated over the IBIs and g integrated over the
/// whole grid, both by the trapezoidal rule (interval boundaries enter
/// through the same linear interpolant that located them).
pub fn integrated_measures(mt: &MeasureTrace) -> (f64, f64) {
    let lin = |t: f64, series: &[f64]| -> f64 {
        // series value at t by linear interpolation on the grid
        let i = mt
            .grid
            .partition_point(|&g| g < t)
            .clamp(1, mt.grid.len() - 1);
        let (t0, t1) = (mt.grid[i - 1], mt.grid[i]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        series[i - 1] * (1.0 - w) + series[i] * w
    };
    let mut n_blp = 0.0;
    for &(a, b) in &mt.ibi {
        // walk the grid segments overlapping [a, b]
        let mut lo = a;
        let mut v_lo = lin(lo, &mt.sigma);
        for i in 0..mt.grid.len() {
            let t = mt.grid[i];
            if t <= a {
                continue;
            }
            let hi = t.min(b);
            let v_hi = lin(hi, &mt.sigma);
            n_blp += 0.5 * (v_lo + v_hi) * (hi - lo);
            lo = hi;
            v_lo = v_hi;
            if t >= b {
                break;
            }
        }
        if lo < b {
            let v_hi = lin(b, &mt.sigma);
            n_blp += 0.5 * (v_lo + v_hi) * (b - lo);
        }
    }
    let mut i_rhp = 0.0;
    for w in mt.grid.windows(2).zip(mt.g.windows(2)) {
        i_rhp += 0.5 * (w.1[0] + w.1[1]) * (w.0[1] - w.0[0]);
    }
    (n_blp, i_rhp)
}

/// Finite-difference derivative of the trace distance along two
/// trajectories: centered in the interior, one-sided at the ends.
pub fn sigma_by_finite_difference(t1: &Trajectory, t2: &Trajectory) -> Result<Vec<f64>> {
    crate::oracles::finite_difference_sigma(t1, t2)
}
