//! The seven time-dependent master-equation coefficients.
//!
//! Second-order parts are single integrals of the correlation kernels
//! against trigonometric factors; fourth-order parts are triple integrals
//! over the ordered simplex 0 ≤ t₃ ≤ t₂ ≤ t₁ ≤ t. Two independent engines
//! evaluate the latter:
//!
//!  * [`fourth_order`] — tensor Gauss-Legendre cubature at a single time,
//!    for any kernel representation; cost grows like (ω₀t)³.
//!  * [`evaluate_trace`] — whole-grid evaluation for closed-form kernels
//!    via factorized cumulative-integral chains on a shared panel mesh;
//!    cost grows like ω₀·t_max and is what the CLI and dynamics use.
//!
//! Their agreement is itself a correctness check and is enforced in tests.
//!
//! The nonsecular coefficients α, β oscillate at ~2ω₀ and cannot be
//! faithfully splined on a figure-resolution grid; the trace therefore also
//! carries their slowly-varying envelopes per carrier ([`CarrierSlot`]),
//! from which α(t), β(t) reconstruct exactly between grid points.

mod cubature;
mod separable;
pub(crate) mod tables;

use std::cell::RefCell;
use std::io::Write;

pub use cubature::{CubatureOptions, PointMeta};
pub use separable::{CarrierFreq, CarrierSlot, Phase};

use crate::mesh::Mesh;
use crate::spectral::{CorrelationKernels, SpectralParams};
use crate::{quad, Error, Result};

/// Perturbative truncation of the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TclOrder {
    Tcl2,
    Tcl4,
}

impl std::str::FromStr for TclOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tcl2" => Ok(TclOrder::Tcl2),
            "tcl4" => Ok(TclOrder::Tcl4),
            other => Err(Error::InvalidParams(format!(
                "unknown order '{other}' (expected tcl2 or tcl4)"
            ))),
        }
    }
}

impl std::fmt::Display for TclOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TclOrder::Tcl2 => "tcl2",
            TclOrder::Tcl4 => "tcl4",
        })
    }
}

/// Which of the two Lamb-shift / transition-rate branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Selects one fourth-order coefficient integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourthOrderSelector {
    SPlus,
    SMinus,
    GammaPlus,
    GammaMinus,
    GammaZero,
    Alpha,
    Beta,
}

impl FourthOrderSelector {
    pub const ALL: [FourthOrderSelector; 7] = [
        FourthOrderSelector::SPlus,
        FourthOrderSelector::SMinus,
        FourthOrderSelector::GammaPlus,
        FourthOrderSelector::GammaMinus,
        FourthOrderSelector::GammaZero,
        FourthOrderSelector::Alpha,
        FourthOrderSelector::Beta,
    ];

    fn table(&self) -> &'static tables::Table {
        match self {
            FourthOrderSelector::SPlus => &tables::S_PLUS_4,
            FourthOrderSelector::SMinus => &tables::S_MINUS_4,
            FourthOrderSelector::GammaPlus => &tables::GAMMA_PLUS_4,
            FourthOrderSelector::GammaMinus => &tables::GAMMA_MINUS_4,
            FourthOrderSelector::GammaZero => &tables::GAMMA_ZERO_4,
            FourthOrderSelector::Alpha => &tables::ALPHA_4,
            FourthOrderSelector::Beta => &tables::BETA_4,
        }
    }
}

impl std::fmt::Display for FourthOrderSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FourthOrderSelector::SPlus => "S+IV",
            FourthOrderSelector::SMinus => "S-IV",
            FourthOrderSelector::GammaPlus => "G+IV",
            FourthOrderSelector::GammaMinus => "G-IV",
            FourthOrderSelector::GammaZero => "G0",
            FourthOrderSelector::Alpha => "alphaIV",
            FourthOrderSelector::Beta => "betaIV",
        })
    }
}

/// One coefficient split by perturbative order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Contribution {
    pub second: f64,
    pub fourth: f64,
}

impl Contribution {
    pub fn total(&self) -> f64 {
        self.second + self.fourth
    }
}

/// All seven coefficients at one instant.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CoefficientSet {
    pub t: f64,
    pub s_plus: Contribution,
    pub s_minus: Contribution,
    pub gamma_plus: Contribution,
    pub gamma_minus: Contribution,
    /// purely fourth-order: its second part is identically zero
    pub gamma_zero: Contribution,
    pub alpha: Contribution,
    pub beta: Contribution,
}

impl CoefficientSet {
    pub fn zero(t: f64) -> Self {
        CoefficientSet {
            t,
            ..Default::default()
        }
    }

    /// Builds a set whose totals are the given values (placed in the
    /// second-order slot). Used by tests and synthetic scenarios.
    #[allow(clippy::too_many_arguments)]
    pub fn from_totals(
        t: f64,
        s_plus: f64,
        s_minus: f64,
        gamma_plus: f64,
        gamma_minus: f64,
        gamma_zero: f64,
        alpha: f64,
        beta: f64,
    ) -> Self {
        let c = |v: f64| Contribution {
            second: v,
            fourth: 0.0,
        };
        CoefficientSet {
            t,
            s_plus: c(s_plus),
            s_minus: c(s_minus),
            gamma_plus: c(gamma_plus),
            gamma_minus: c(gamma_minus),
            gamma_zero: Contribution {
                second: 0.0,
                fourth: gamma_zero,
            },
            alpha: c(alpha),
            beta: c(beta),
        }
    }

    /// largest magnitude among the dissipative rates and nonsecular terms
    pub fn max_rate_magnitude(&self) -> f64 {
        [
            self.gamma_minus.total(),
            self.gamma_plus.total(),
            self.gamma_zero.total(),
            self.alpha.total(),
            self.beta.total(),
        ]
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Slow envelopes of α and β per carrier slot, sampled on the trace grid.
/// α(t) = Σₖ slots[k].value(t) · alpha[k](t), likewise β; the envelopes
/// vary on the bath time scale and spline cleanly where α itself cannot.
#[derive(Debug, Clone)]
pub struct NonsecularEnvelopes {
    pub slots: Vec<CarrierSlot>,
    /// `alpha[k][i]` = envelope of slot k at grid point i
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
}

/// Coefficients sampled on a time grid, with convergence metadata and
/// (when produced by [`evaluate_trace`]) the nonsecular envelope bank.
#[derive(Debug, Clone)]
pub struct CoefficientTrace {
    pub params: SpectralParams,
    pub order: TclOrder,
    pub grid: Vec<f64>,
    pub sets: Vec<CoefficientSet>,
    pub meta: Vec<PointMeta>,
    pub envelopes: Option<NonsecularEnvelopes>,
}

impl CoefficientTrace {
    /// Assembles a trace from externally computed sets (tests, synthetic
    /// scenarios). No envelope bank: α/β are taken at face value.
    pub fn from_sets(params: SpectralParams, order: TclOrder, sets: Vec<CoefficientSet>) -> Self {
        let grid = sets.iter().map(|s| s.t).collect();
        let meta = sets
            .iter()
            .map(|_| PointMeta {
                order: 0,
                error: 0.0,
            })
            .collect();
        CoefficientTrace {
            params,
            order,
            grid,
            sets,
            meta,
            envelopes: None,
        }
    }

    pub fn tmax(&self) -> f64 {
        *self.grid.last().expect("trace grid nonempty")
    }

    /// largest rate magnitude over the whole grid (interval-detection and
    /// step-control scales derive from it)
    pub fn max_rate_magnitude(&self) -> f64 {
        self.sets
            .iter()
            .map(CoefficientSet::max_rate_magnitude)
            .fold(0.0, f64::max)
    }

    /// CSV with the exact column set downstream tooling expects.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "t,S+II,S+IV,S-II,S-IV,G-II,G-IV,G+II,G+IV,G0,alphaII,alphaIV,betaII,betaIV"
        )?;
        for s in &self.sets {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.t,
                s.s_plus.second,
                s.s_plus.fourth,
                s.s_minus.second,
                s.s_minus.fourth,
                s.gamma_minus.second,
                s.gamma_minus.fourth,
                s.gamma_plus.second,
                s.gamma_plus.fourth,
                s.gamma_zero.fourth,
                s.alpha.second,
                s.alpha.fourth,
                s.beta.second,
                s.beta.fourth,
            )?;
        }
        Ok(())
    }
}

/// Uniform grid of `n` points covering [0, tmax].
pub fn time_grid(tmax: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && tmax > 0.0, "grid needs n >= 2 and tmax > 0");
    (0..n)
        .map(|i| tmax * (i as f64) / ((n - 1) as f64))
        .collect()
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty time grid".into()));
    }
    if grid[0] != 0.0 {
        return Err(Error::InvalidGrid(format!(
            "grid must start at 0 (got {})",
            grid[0]
        )));
    }
    for w in grid.windows(2) {
        let increasing = w[1] > w[0];
        if !increasing || !w[1].is_finite() {
            return Err(Error::InvalidGrid(format!(
                "grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// second-order coefficients: single adaptive integrals
// ---------------------------------------------------------------------------

/// Wraps a fallible kernel in an infallible closure for the quadrature
/// driver, parking the first error outside.
fn with_kernel_errors<T>(body: impl FnOnce(&RefCell<Option<Error>>) -> Result<T>) -> Result<T> {
    let pending = RefCell::new(None);
    let out = body(&pending);
    if let Some(err) = pending.into_inner() {
        return Err(err);
    }
    out
}

fn integral_scales(kernels: &CorrelationKernels, t: f64) -> (Vec<f64>, f64) {
    let p = &kernels.params;
    let breakpoints = quad::oscillation_breakpoints(0.0, t, p.omega0 + p.omega_c().abs());
    // |∫| is bounded by amp·min(t, 1/λ); anything 1e-12 below that is zero
    let amp = 0.5 * p.gamma0 * p.lambda;
    let abs_floor = 1e-12 * amp * t.min(1.0 / p.lambda);
    (breakpoints, abs_floor)
}

const SECOND_ORDER_REL_TOL: f64 = 1e-6;
const MAX_SEGMENTS: usize = 1 << 20;

/// S±(t) to second order.
pub fn lamb_shift_2(t: f64, kernels: &CorrelationKernels, sign: Sign) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParams(format!("time {t} invalid")));
    }
    let omega0 = kernels.params.omega0;
    let (breakpoints, abs_floor) = integral_scales(kernels, t);
    with_kernel_errors(|pending| {
        let f = |tau: f64| -> f64 {
            let eval = || -> Result<f64> {
                let (s, c) = (omega0 * tau).sin_cos();
                let v = match sign {
                    Sign::Plus => s * kernels.c(tau)? - c * kernels.s(tau)?,
                    Sign::Minus => -(s * kernels.c(tau)? + c * kernels.s(tau)?),
                };
                Ok(v)
            };
            eval().unwrap_or_else(|e| {
                pending.borrow_mut().get_or_insert(e);
                0.0
            })
        };
        let r = quad::adaptive_gk(
            f,
            &breakpoints,
            SECOND_ORDER_REL_TOL,
            abs_floor,
            MAX_SEGMENTS,
        )?;
        Ok(r.value)
    })
}

/// Γ±(t) to second order.
pub fn gamma_2(t: f64, kernels: &CorrelationKernels, sign: Sign) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParams(format!("time {t} invalid")));
    }
    let omega0 = kernels.params.omega0;
    let (breakpoints, abs_floor) = integral_scales(kernels, t);
    with_kernel_errors(|pending| {
        let f = |tau: f64| -> f64 {
            let eval = || -> Result<f64> {
                let (s, c) = (omega0 * tau).sin_cos();
                let v = match sign {
                    Sign::Plus => c * kernels.c(tau)? - s * kernels.s(tau)?,
                    Sign::Minus => c * kernels.c(tau)? + s * kernels.s(tau)?,
                };
                Ok(2.0 * v)
            };
            eval().unwrap_or_else(|e| {
                pending.borrow_mut().get_or_insert(e);
                0.0
            })
        };
        let r = quad::adaptive_gk(
            f,
            &breakpoints,
            SECOND_ORDER_REL_TOL,
            abs_floor,
            MAX_SEGMENTS,
        )?;
        Ok(r.value)
    })
}

/// (α(t), β(t)) to second order.
pub fn nonsecular_2(t: f64, kernels: &CorrelationKernels) -> Result<(f64, f64)> {
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParams(format!("time {t} invalid")));
    }
    let omega0 = kernels.params.omega0;
    let (breakpoints, abs_floor) = integral_scales(kernels, t);
    with_kernel_errors(|pending| {
        let alpha = quad::adaptive_gk(
            |tau: f64| {
                kernels
                    .c(t - tau)
                    .map(|c| 2.0 * c * (omega0 * (t + tau)).cos())
                    .unwrap_or_else(|e| {
                        pending.borrow_mut().get_or_insert(e);
                        0.0
                    })
            },
            &breakpoints,
            SECOND_ORDER_REL_TOL,
            abs_floor,
            MAX_SEGMENTS,
        )?;
        let beta = quad::adaptive_gk(
            |tau: f64| {
                kernels
                    .c(t - tau)
                    .map(|c| 2.0 * c * (omega0 * (t + tau)).sin())
                    .unwrap_or_else(|e| {
                        pending.borrow_mut().get_or_insert(e);
                        0.0
                    })
            },
            &breakpoints,
            SECOND_ORDER_REL_TOL,
            abs_floor,
            MAX_SEGMENTS,
        )?;
        Ok((alpha.value, beta.value))
    })
}

// ---------------------------------------------------------------------------
// fourth-order coefficients: simplex cubature
// ---------------------------------------------------------------------------

/// One fourth-order coefficient at one time, by simplex cubature.
pub fn fourth_order(
    t: f64,
    kernels: &CorrelationKernels,
    which: FourthOrderSelector,
) -> Result<f64> {
    fourth_order_with(t, kernels, which, &CubatureOptions::default()).map(|(v, _)| v)
}

/// As [`fourth_order`], exposing convergence metadata and options.
pub fn fourth_order_with(
    t: f64,
    kernels: &CorrelationKernels,
    which: FourthOrderSelector,
    opts: &CubatureOptions,
) -> Result<(f64, PointMeta)> {
    cubature::simplex_integral(t, kernels, which.table(), opts)
}

/// All seven fourth-order coefficients at one time on shared cubature
/// nodes. Almost the cost of a single selector: kernel and trigonometric
/// values per node are computed once.
pub fn fourth_order_sweep(
    t: f64,
    kernels: &CorrelationKernels,
    opts: &CubatureOptions,
) -> Result<[(f64, PointMeta); 7]> {
    let tabs: Vec<&tables::Table> = FourthOrderSelector::ALL.iter().map(|s| s.table()).collect();
    let v = cubature::simplex_integral_multi(t, kernels, &tabs, opts)?;
    Ok([v[0], v[1], v[2], v[3], v[4], v[5], v[6]])
}

// ---------------------------------------------------------------------------
// whole-trace evaluation on a shared mesh
// ---------------------------------------------------------------------------

// Mesh panels resolve the fastest integrand present. Second-order
// integrands oscillate at ω₀+|ω_c|; the third chain pass of the
// fourth-order factorization accumulates three such factors. Intermediate
// chain values grow like e^{2λs} in the worst case, hence the doubled
// decay scale.
fn mesh_scales(params: &SpectralParams, order: TclOrder) -> (f64, f64) {
    let omega = params.omega0 + params.omega_c().abs();
    match order {
        TclOrder::Tcl2 => (omega, params.lambda),
        TclOrder::Tcl4 => (3.0 * omega, 2.0 * params.lambda),
    }
}

/// per-coefficient columns evaluated on one mesh
struct MeshColumns {
    /// indexed by FourthOrderSelector order: S₊ S₋ Γ₊ Γ₋ Γ₀ α β
    second: [Vec<f64>; 7],
    fourth: [Vec<f64>; 7],
    env: Vec<(CarrierSlot, Vec<f64>, Vec<f64>)>,
    panels: usize,
}

fn mesh_columns(
    params: &SpectralParams,
    grid: &[f64],
    order: TclOrder,
    refinement: f64,
) -> MeshColumns {
    let (omega_scale, decay_scale) = mesh_scales(params, order);
    let mesh = Mesh::new(
        grid,
        omega_scale * refinement,
        decay_scale * refinement,
        crate::mesh::DEFAULT_NODES_PER_PANEL,
    );
    let n = mesh.node_count();
    let p = params;
    let amp = 0.5 * p.gamma0 * p.lambda;
    let (lambda, wc, omega0) = (p.lambda, p.omega_c(), p.omega0);

    // kernel and trigonometric node samples for the second-order passes
    let c_nodes = mesh.sample(|s| amp * (-lambda * s).exp() * (wc * s).cos());
    let s_nodes = mesh.sample(|s| amp * (-lambda * s).exp() * (wc * s).sin());
    let cos0 = mesh.sample(|s| (omega0 * s).cos());
    let sin0 = mesh.sample(|s| (omega0 * s).sin());

    let product =
        |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
    let icc = mesh.at_breakpoints(&mesh.cumulative(&product(&cos0, &c_nodes)));
    let isc = mesh.at_breakpoints(&mesh.cumulative(&product(&sin0, &c_nodes)));
    let ics = mesh.at_breakpoints(&mesh.cumulative(&product(&cos0, &s_nodes)));
    let iss = mesh.at_breakpoints(&mesh.cumulative(&product(&sin0, &s_nodes)));

    let g = grid.len();
    let mut second: [Vec<f64>; 7] = Default::default();
    let mut fourth: [Vec<f64>; 7] = Default::default();
    for col in second.iter_mut().chain(fourth.iter_mut()) {
        *col = vec![0.0; g];
    }
    // Ec, Es: envelopes of the second-order nonsecular pair
    let mut ec = vec![0.0; g];
    let mut es = vec![0.0; g];
    for i in 0..g {
        second[0][i] = isc[i] - ics[i];
        second[1][i] = -(isc[i] + ics[i]);
        second[2][i] = 2.0 * (icc[i] - iss[i]);
        second[3][i] = 2.0 * (icc[i] + iss[i]);
        // gamma_zero has no second-order part
        ec[i] = 2.0 * icc[i];
        es[i] = 2.0 * isc[i];
        let (s2, c2) = (2.0 * omega0 * grid[i]).sin_cos();
        second[5][i] = c2 * ec[i] + s2 * es[i];
        second[6][i] = s2 * ec[i] - c2 * es[i];
    }

    // envelope bank keyed by carrier slot; second-order parts seed it
    let mut env_map: std::collections::BTreeMap<CarrierSlot, (Vec<f64>, Vec<f64>)> =
        std::collections::BTreeMap::new();
    {
        let cos_slot = CarrierSlot {
            freq: CarrierFreq::TwoOmega0,
            phase: Phase::Cos,
            decayed: false,
        };
        let sin_slot = CarrierSlot {
            freq: CarrierFreq::TwoOmega0,
            phase: Phase::Sin,
            decayed: false,
        };
        let entry = env_map
            .entry(cos_slot)
            .or_insert_with(|| (vec![0.0; g], vec![0.0; g]));
        for i in 0..g {
            entry.0[i] += ec[i]; // α: cos(2ω₀t)·Ec
            entry.1[i] -= es[i]; // β: −cos(2ω₀t)·Es
        }
        let entry = env_map
            .entry(sin_slot)
            .or_insert_with(|| (vec![0.0; g], vec![0.0; g]));
        for i in 0..g {
            entry.0[i] += es[i]; // α: sin(2ω₀t)·Es
            entry.1[i] += ec[i]; // β: sin(2ω₀t)·Ec
        }
    }

    if order == TclOrder::Tcl4 {
        let plan = separable::trace_plan();
        let chains = separable::evaluate_chains(&plan.chains, &mesh, lambda, wc, omega0);
        let amp2 = amp * amp;
        for (ci, cplan) in plan.coeffs.iter().enumerate() {
            for group in &cplan.groups {
                // envelope of this slot: prefactor · amp² · Σ w·chain
                let mut env = vec![0.0; g];
                for &(w, chain_idx) in &group.terms {
                    let scale = cplan.prefactor * amp2 * w;
                    for i in 0..g {
                        env[i] += scale * chains[chain_idx][i];
                    }
                }
                for i in 0..g {
                    fourth[ci][i] += group.slot.value(params, grid[i]) * env[i];
                }
                if ci == 5 || ci == 6 {
                    let entry = env_map
                        .entry(group.slot)
                        .or_insert_with(|| (vec![0.0; g], vec![0.0; g]));
                    let dst = if ci == 5 { &mut entry.0 } else { &mut entry.1 };
                    for i in 0..g {
                        dst[i] += env[i];
                    }
                }
            }
        }
    }

    // grid[0] == 0 and every coefficient is an integral over [0, t]:
    // scrub the ~1e-22 roundoff the collocation matrix leaves at t = 0
    for col in second.iter_mut().chain(fourth.iter_mut()) {
        col[0] = 0.0;
    }
    let env = env_map
        .into_iter()
        .map(|(slot, (mut a, mut b))| {
            a[0] = 0.0;
            b[0] = 0.0;
            (slot, a, b)
        })
        .collect();
    MeshColumns {
        second,
        fourth,
        env,
        panels: n / (crate::mesh::DEFAULT_NODES_PER_PANEL + 1),
    }
}

/// Evaluates all coefficients of the chosen order on `grid`.
///
/// Uses the closed-form Lorentzian kernels (the factorized whole-trace
/// engine requires them); the error metadata per point is the observed
/// shift under a ~1.6× coarser mesh, i.e. an actual convergence
/// measurement, not a bound transcribed from the refinement rule.
pub fn evaluate_trace(
    params: &SpectralParams,
    grid: &[f64],
    order: TclOrder,
) -> Result<CoefficientTrace> {
    params.validate()?;
    validate_grid(grid)?;
    let fine = mesh_columns(params, grid, order, 1.0);
    let coarse = mesh_columns(params, grid, order, 1.0 / 1.6);

    let g = grid.len();
    let mut sets = Vec::with_capacity(g);
    let mut meta = Vec::with_capacity(g);
    for (i, &t) in grid.iter().enumerate() {
        let pick = |cols: &MeshColumns, k: usize| Contribution {
            second: cols.second[k][i],
            fourth: cols.fourth[k][i],
        };
        sets.push(CoefficientSet {
            t,
            s_plus: pick(&fine, 0),
            s_minus: pick(&fine, 1),
            gamma_plus: pick(&fine, 2),
            gamma_minus: pick(&fine, 3),
            gamma_zero: pick(&fine, 4),
            alpha: pick(&fine, 5),
            beta: pick(&fine, 6),
        });
        let mut err = 0.0_f64;
        for k in 0..7 {
            let f = fine.second[k][i] + fine.fourth[k][i];
            let c = coarse.second[k][i] + coarse.fourth[k][i];
            err = err.max((f - c).abs());
        }
        meta.push(PointMeta {
            order: fine.panels as u32,
            error: err,
        });
    }

    let envelopes = NonsecularEnvelopes {
        slots: fine.env.iter().map(|(s, _, _)| *s).collect(),
        alpha: fine.env.iter().map(|(_, a, _)| a.clone()).collect(),
        beta: fine.env.iter().map(|(_, _, b)| b.clone()).collect(),
    };

    Ok(CoefficientTrace {
        params: *params,
        order,
        grid: grid.to_vec(),
        sets,
        meta,
        envelopes: Some(envelopes),
    })
}
