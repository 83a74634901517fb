//! Reduced-state propagation in the interaction picture.
//!
//! Three routes to b(t):
//!
//! * [`propagate`] — adaptive Dormand-Prince 5(4) on the full Bloch
//!   equation, coefficients interpolated from a [`CoefficientTrace`].
//! * [`secular_solution`] — the closed form that is exact once the
//!   nonsecular pair α, β is dropped; Θ, Λ, δ come from exact integrals of
//!   the spline interpolant so the comparison against the ODE is limited by
//!   the integrator, not by quadrature mismatch.
//! * [`rwa_decay_rate`]/[`rwa_f`] — the resonant rotating-wave reference
//!   model, which has a single decay rate γ(t) in closed form.
//!
//! The trace-distance measures downstream are frame-invariant, so nothing
//! here ever leaves the interaction picture.

use std::io::Write;

use num_complex::Complex64;

use crate::spectral::SpectralParams;
use crate::spline::CubicSpline;
use crate::tcl::{CarrierSlot, CoefficientSet, CoefficientTrace};
use crate::{Error, Result};

/// State of the two-level system: ρ = ½(1 + b·σ).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl BlochVector {
    pub fn new(bx: f64, by: f64, bz: f64) -> Self {
        BlochVector { bx, by, bz }
    }

    /// excited state |1⟩⟨1|
    pub fn excited() -> Self {
        BlochVector::new(0.0, 0.0, 1.0)
    }

    /// ground state |0⟩⟨0|
    pub fn ground() -> Self {
        BlochVector::new(0.0, 0.0, -1.0)
    }

    pub fn norm(&self) -> f64 {
        (self.bx * self.bx + self.by * self.by + self.bz * self.bz).sqrt()
    }

    fn is_physical(&self) -> bool {
        self.norm() <= 1.0 + 1e-9
    }
}

/// Affine form ḃ = M·b + v of the Bloch equation at one instant.
#[derive(Debug, Clone, Copy)]
pub struct DampingSystem {
    pub m: [[f64; 3]; 3],
    pub v: [f64; 3],
}

impl DampingSystem {
    /// Assembles M and v from coefficient totals. M is block diagonal:
    /// the z row/column never couples to x, y.
    pub fn from_coefficients(c: &CoefficientSet) -> Self {
        let gsum = c.gamma_minus.total() + c.gamma_plus.total();
        let g0 = c.gamma_zero.total();
        let al = c.alpha.total();
        let be = c.beta.total();
        let sdiff = c.s_minus.total() - c.s_plus.total();
        DampingSystem {
            m: [
                [-0.5 * (gsum + g0 - 2.0 * al), sdiff - be, 0.0],
                [-(sdiff + be), -0.5 * (gsum + g0 + 2.0 * al), 0.0],
                [0.0, 0.0, -gsum],
            ],
            v: [0.0, 0.0, c.gamma_plus.total() - c.gamma_minus.total()],
        }
    }

    pub fn apply(&self, b: &BlochVector) -> BlochVector {
        let x = [b.bx, b.by, b.bz];
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.v[i] + self.m[i][0] * x[0] + self.m[i][1] * x[1] + self.m[i][2] * x[2];
        }
        BlochVector::new(out[0], out[1], out[2])
    }
}

/// Right-hand side of the Bloch equation from coefficient totals.
pub fn bloch_rhs(b: &BlochVector, c: &CoefficientSet) -> BlochVector {
    let gsum = c.gamma_minus.total() + c.gamma_plus.total();
    let g0 = c.gamma_zero.total();
    let al = c.alpha.total();
    let be = c.beta.total();
    let sdiff = c.s_minus.total() - c.s_plus.total();
    BlochVector::new(
        -0.5 * (gsum + g0 - 2.0 * al) * b.bx + (sdiff - be) * b.by,
        -0.5 * (gsum + g0 + 2.0 * al) * b.by - (sdiff + be) * b.bx,
        -gsum * b.bz + (c.gamma_plus.total() - c.gamma_minus.total()),
    )
}

// ---------------------------------------------------------------------------
// coefficient interpolation
// ---------------------------------------------------------------------------

enum NonsecularInterp {
    /// plain splines of the sampled α, β (synthetic traces)
    Direct {
        alpha: CubicSpline,
        beta: CubicSpline,
    },
    /// carrier × splined envelope (traces from `evaluate_trace`); the
    /// envelopes vary on the bath scale, so splining them does not alias
    /// the 2ω₀ oscillation the way splining α itself would
    Envelopes {
        slots: Vec<CarrierSlot>,
        alpha: Vec<CubicSpline>,
        beta: Vec<CubicSpline>,
    },
}

/// Continuous-time view of a [`CoefficientTrace`].
pub struct CoefficientInterpolant {
    params: SpectralParams,
    tmax: f64,
    s_plus: CubicSpline,
    s_minus: CubicSpline,
    gamma_plus: CubicSpline,
    gamma_minus: CubicSpline,
    gamma_zero: CubicSpline,
    nonsecular: NonsecularInterp,
    max_rate: f64,
    nonsecular_scale: f64,
}

impl CoefficientInterpolant {
    pub fn new(trace: &CoefficientTrace) -> Self {
        let grid = trace.grid.clone();
        let col = |f: &dyn Fn(&CoefficientSet) -> f64| -> CubicSpline {
            CubicSpline::new(grid.clone(), trace.sets.iter().map(f).collect())
        };
        let nonsecular = match &trace.envelopes {
            Some(env) => NonsecularInterp::Envelopes {
                slots: env.slots.clone(),
                alpha: env
                    .alpha
                    .iter()
                    .map(|col| CubicSpline::new(grid.clone(), col.clone()))
                    .collect(),
                beta: env
                    .beta
                    .iter()
                    .map(|col| CubicSpline::new(grid.clone(), col.clone()))
                    .collect(),
            },
            None => NonsecularInterp::Direct {
                alpha: col(&|s| s.alpha.total()),
                beta: col(&|s| s.beta.total()),
            },
        };
        let nonsecular_scale = trace
            .sets
            .iter()
            .map(|s| s.alpha.total().abs() + s.beta.total().abs())
            .fold(0.0_f64, f64::max)
            .max(match &trace.envelopes {
                Some(env) => env
                    .alpha
                    .iter()
                    .chain(env.beta.iter())
                    .flat_map(|c| c.iter())
                    .fold(0.0_f64, |m, v| m.max(v.abs())),
                None => 0.0,
            });
        CoefficientInterpolant {
            params: trace.params,
            tmax: trace.tmax(),
            s_plus: col(&|s| s.s_plus.total()),
            s_minus: col(&|s| s.s_minus.total()),
            gamma_plus: col(&|s| s.gamma_plus.total()),
            gamma_minus: col(&|s| s.gamma_minus.total()),
            gamma_zero: col(&|s| s.gamma_zero.total()),
            nonsecular,
            max_rate: trace.max_rate_magnitude(),
            nonsecular_scale,
        }
    }

    pub fn tmax(&self) -> f64 {
        self.tmax
    }

    pub fn max_rate(&self) -> f64 {
        self.max_rate
    }

    /// peak |α| + |β| scale, used for the oscillation-aware step cap
    pub fn nonsecular_scale(&self) -> f64 {
        self.nonsecular_scale
    }

    fn alpha_beta(&self, t: f64) -> (f64, f64) {
        match &self.nonsecular {
            NonsecularInterp::Direct { alpha, beta } => (alpha.eval(t), beta.eval(t)),
            NonsecularInterp::Envelopes { slots, alpha, beta } => {
                let mut a = 0.0;
                let mut b = 0.0;
                for (k, slot) in slots.iter().enumerate() {
                    let carrier = slot.value(&self.params, t);
                    a += carrier * alpha[k].eval(t);
                    b += carrier * beta[k].eval(t);
                }
                (a, b)
            }
        }
    }

    /// Coefficient totals at an arbitrary time inside the trace window.
    pub fn set_at(&self, t: f64) -> Result<CoefficientSet> {
        if !(0.0..=self.tmax * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::OutOfRange { t, tmax: self.tmax });
        }
        let t = t.min(self.tmax);
        let (alpha, beta) = self.alpha_beta(t);
        Ok(CoefficientSet::from_totals(
            t,
            self.s_plus.eval(t),
            self.s_minus.eval(t),
            self.gamma_plus.eval(t),
            self.gamma_minus.eval(t),
            self.gamma_zero.eval(t),
            alpha,
            beta,
        ))
    }
}

// ---------------------------------------------------------------------------
// adaptive Dormand-Prince 5(4) propagation
// ---------------------------------------------------------------------------

/// Integration controls for [`propagate_with`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// drop α, β from the generator (the secular comparison mode)
    pub zero_nonsecular: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            zero_nonsecular: false,
        }
    }
}

/// Bloch trajectory sampled on the trace grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochVector>,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,bx,by,bz")?;
        for (t, b) in self.times.iter().zip(&self.states) {
            writeln!(w, "{},{},{},{}", t, b.bx, b.by, b.bz)?;
        }
        Ok(())
    }
}

const DP_C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// difference between the 5th-order weights and the embedded 4th-order ones
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type V3 = [f64; 3];

fn axpy(y: &V3, h: f64, terms: &[(f64, &V3)]) -> V3 {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Propagates with default options (full generator, rel tol 1e-9).
pub fn propagate(
    initial: BlochVector,
    trace: &CoefficientTrace,
    t_final: f64,
) -> Result<Trajectory> {
    propagate_with(initial, trace, t_final, &OdeOptions::default())
}

/// Integrates ḃ = M(t)b + v(t) from t = 0, emitting the state at every
/// trace grid point up to `t_final` (plus `t_final` itself if it falls
/// between grid points). Steps land exactly on emission times.
pub fn propagate_with(
    initial: BlochVector,
    trace: &CoefficientTrace,
    t_final: f64,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    if !initial.is_physical() {
        return Err(Error::InvalidParams(format!(
            "initial Bloch vector has norm {} > 1",
            initial.norm()
        )));
    }
    let interp = CoefficientInterpolant::new(trace);
    if !(0.0..=interp.tmax() * (1.0 + 1e-12)).contains(&t_final) {
        return Err(Error::OutOfRange {
            t: t_final,
            tmax: interp.tmax(),
        });
    }

    let mut outputs: Vec<f64> = trace
        .grid
        .iter()
        .copied()
        .filter(|&t| t <= t_final * (1.0 + 1e-12))
        .collect();
    if outputs.last().is_none_or(|&l| l < t_final * (1.0 - 1e-12)) {
        outputs.push(t_final);
    }

    let zero_ns = opts.zero_nonsecular;
    let rhs = |t: f64, y: &V3| -> V3 {
        // steps are clipped to the window; only rounding can poke past it
        let mut c = interp
            .set_at(t.clamp(0.0, interp.tmax()))
            .expect("clamped time inside trace window");
        if zero_ns {
            c.alpha = Default::default();
            c.beta = Default::default();
        }
        let d = bloch_rhs(&BlochVector::new(y[0], y[1], y[2]), &c);
        [d.bx, d.by, d.bz]
    };

    // resolve the 2ω₀ oscillation of α, β only when it is actually present
    let oscillatory = !zero_ns && interp.nonsecular_scale() > 1e-6 * interp.max_rate();
    let span = t_final.max(f64::MIN_POSITIVE);
    let h_max = if oscillatory {
        std::f64::consts::PI / (4.0 * trace.params.omega0)
    } else {
        span / 8.0
    };

    let mut times = Vec::with_capacity(outputs.len());
    let mut states = Vec::with_capacity(outputs.len());
    let mut t = 0.0_f64;
    let mut y = [initial.bx, initial.by, initial.bz];
    let mut k1 = rhs(t, &y);
    let mut h = h_max.min(span / 64.0).max(1e-12);

    for &t_out in &outputs {
        while t < t_out {
            let mut step = h.min(h_max).min(t_out - t);
            loop {
                if step < 1e-14 * (1.0 + t.abs()) {
                    return Err(Error::StepSizeUnderflow { t });
                }
                let k2 = rhs(t + DP_C[0] * step, &axpy(&y, step, &[(DP_A[0][0], &k1)]));
                let k3 = rhs(
                    t + DP_C[1] * step,
                    &axpy(&y, step, &[(DP_A[1][0], &k1), (DP_A[1][1], &k2)]),
                );
                let k4 = rhs(
                    t + DP_C[2] * step,
                    &axpy(
                        &y,
                        step,
                        &[(DP_A[2][0], &k1), (DP_A[2][1], &k2), (DP_A[2][2], &k3)],
                    ),
                );
                let k5 = rhs(
                    t + DP_C[3] * step,
                    &axpy(
                        &y,
                        step,
                        &[
                            (DP_A[3][0], &k1),
                            (DP_A[3][1], &k2),
                            (DP_A[3][2], &k3),
                            (DP_A[3][3], &k4),
                        ],
                    ),
                );
                let k6 = rhs(
                    t + DP_C[4] * step,
                    &axpy(
                        &y,
                        step,
                        &[
                            (DP_A[4][0], &k1),
                            (DP_A[4][1], &k2),
                            (DP_A[4][2], &k3),
                            (DP_A[4][3], &k4),
                            (DP_A[4][4], &k5),
                        ],
                    ),
                );
                let y_new = axpy(
                    &y,
                    step,
                    &[
                        (DP_A[5][0], &k1),
                        (DP_A[5][2], &k3),
                        (DP_A[5][3], &k4),
                        (DP_A[5][4], &k5),
                        (DP_A[5][5], &k6),
                    ],
                );
                let k7 = rhs(t + step, &y_new);

                let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
                let mut err_sq = 0.0;
                for i in 0..3 {
                    let e: f64 = DP_E.iter().zip(&ks).map(|(c, k)| c * k[i]).sum::<f64>() * step;
                    let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
                    err_sq += (e / scale) * (e / scale);
                }
                let err = (err_sq / 3.0).sqrt();

                if err <= 1.0 {
                    t += step;
                    y = y_new;
                    k1 = k7; // first-same-as-last
                    let grow = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    h = (step * grow).min(h_max);
                    break;
                }
                step *= (0.9 * err.powf(-0.2)).clamp(0.2, 0.9);
            }
        }
        times.push(t_out);
        states.push(BlochVector::new(y[0], y[1], y[2]));
    }

    Ok(Trajectory { times, states })
}

// ---------------------------------------------------------------------------
// secular closed form
// ---------------------------------------------------------------------------

/// Accumulated secular integrals Θ, Λ, δ as exact integrals of the spline
/// interpolant of the sampled rates.
pub struct SecularIntegrals {
    /// Γ₋ + Γ₊
    sum2: CubicSpline,
    /// Γ₋ + Γ₊ + Γ₀
    sum3: CubicSpline,
    /// S₊ − S₋
    s_diff: CubicSpline,
    /// Γ₊ − Γ₋
    g_diff: CubicSpline,
    tmax: f64,
}

impl SecularIntegrals {
    pub fn from_trace(trace: &CoefficientTrace) -> Self {
        let grid = trace.grid.clone();
        let col = |f: &dyn Fn(&CoefficientSet) -> f64| -> CubicSpline {
            CubicSpline::new(grid.clone(), trace.sets.iter().map(f).collect())
        };
        SecularIntegrals {
            sum2: col(&|s| s.gamma_minus.total() + s.gamma_plus.total()),
            sum3: col(&|s| s.gamma_minus.total() + s.gamma_plus.total() + s.gamma_zero.total()),
            s_diff: col(&|s| s.s_plus.total() - s.s_minus.total()),
            g_diff: col(&|s| s.gamma_plus.total() - s.gamma_minus.total()),
            tmax: trace.tmax(),
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if !(0.0..=self.tmax * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::OutOfRange { t, tmax: self.tmax });
        }
        Ok(())
    }

    /// Θ(t) = ½∫₀ᵗ (Γ₋ + Γ₊ + Γ₀)
    pub fn theta(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(0.5 * self.sum3.integral_to(t.min(self.tmax)))
    }

    /// Λ(t) = ∫₀ᵗ (Γ₋ + Γ₊)
    pub fn lambda(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.sum2.integral_to(t.min(self.tmax)))
    }

    /// δ(t) = ∫₀ᵗ (S₊ − S₋)
    pub fn delta_phase(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.s_diff.integral_to(t.min(self.tmax)))
    }

    /// ∫₀ᵗ e^{Λ(s)} [Γ₊(s) − Γ₋(s)] ds, by per-segment Gauss-Legendre on
    /// the same interpolant Λ is read from.
    pub fn drift(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let t = t.min(self.tmax);
        let gl = crate::quad::gauss_legendre(7);
        let mut acc = 0.0;
        let knots = self.sum2.knots();
        let mut lo = knots[0];
        for &k in &knots[1..] {
            let hi = k.min(t);
            if hi <= lo {
                break;
            }
            acc += gl.integrate(lo, hi, |s| {
                self.sum2.integral_to(s).exp() * self.g_diff.eval(s)
            });
            if hi >= t {
                break;
            }
            lo = hi;
        }
        Ok(acc)
    }
}

/// Closed-form secular state at time t (α = β = 0 dynamics).
pub fn secular_solution(
    initial: BlochVector,
    integrals: &SecularIntegrals,
    t: f64,
) -> Result<BlochVector> {
    let theta = integrals.theta(t)?;
    let lambda = integrals.lambda(t)?;
    let delta = integrals.delta_phase(t)?;
    let drift = integrals.drift(t)?;
    let (sd, cd) = delta.sin_cos();
    let damp_xy = (-theta).exp();
    Ok(BlochVector::new(
        damp_xy * (initial.bx * cd - initial.by * sd),
        damp_xy * (initial.bx * sd + initial.by * cd),
        (-lambda).exp() * (initial.bz + drift),
    ))
}

// ---------------------------------------------------------------------------
// RWA reference model
// ---------------------------------------------------------------------------

/// sinh(z)/z, stable for small |z|
fn sinhc(z: Complex64) -> Complex64 {
    if z.norm_sqr() < 1e-8 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// (cosh(dt/2) + ((λ−iΔ)/d)·sinh(dt/2), e^{−(λ−iΔ)t/2} × that) — the
/// amplitude map of the resonant model. Expressed through sinhc so it is
/// manifestly even in d: the branch of the complex square root is
/// irrelevant.
fn rwa_amplitude(t: f64, p: &SpectralParams) -> (Complex64, Complex64) {
    let lam_minus_idelta = Complex64::new(p.lambda, -p.delta);
    let d2 = lam_minus_idelta * lam_minus_idelta - 2.0 * p.gamma0 * p.lambda;
    let d = d2.sqrt();
    let z = d * (0.5 * t);
    let half_t = Complex64::new(0.5 * t, 0.0);
    let core = z.cosh() + lam_minus_idelta * half_t * sinhc(z);
    let g = (-lam_minus_idelta * half_t).exp() * core;
    (core, g)
}

/// Decay rate γ(t) of the rotating-wave model and its accumulation
/// Γ(t) = ∫₀ᵗ γ. Γ comes from the closed form −2 ln|G(t)| of the amplitude
/// map (tested against direct quadrature of γ).
pub fn rwa_decay_rate(t: f64, p: &SpectralParams) -> Result<(f64, f64)> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParams(format!("time {t} invalid")));
    }
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let lam_minus_idelta = Complex64::new(p.lambda, -p.delta);
    let d2 = lam_minus_idelta * lam_minus_idelta - 2.0 * p.gamma0 * p.lambda;
    let d = d2.sqrt();
    let z = d * (0.5 * t);
    let (core, g) = rwa_amplitude(t, p);
    // γ = Re[2γ₀λ sinh(dt/2) / (d cosh(dt/2) + (λ−iΔ) sinh(dt/2))],
    // written with sinhc to stay finite through d → 0
    let num = 2.0 * p.gamma0 * p.lambda * (0.5 * t) * sinhc(z);
    let gamma = (num / core).re;
    let accum = -g.norm_sqr().ln();
    Ok((gamma, accum))
}

/// RWA diagnostics sampled on a grid.
#[derive(Debug, Clone)]
pub struct RwaTrace {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_accum: Vec<f64>,
}

pub fn rwa_trace(params: &SpectralParams, grid: &[f64]) -> Result<RwaTrace> {
    let mut gamma = Vec::with_capacity(grid.len());
    let mut accum = Vec::with_capacity(grid.len());
    for &t in grid {
        let (g, a) = rwa_decay_rate(t, params)?;
        gamma.push(g);
        accum.push(a);
    }
    Ok(RwaTrace {
        times: grid.to_vec(),
        gamma,
        gamma_accum: accum,
    })
}

impl RwaTrace {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,gamma,Gamma_accum")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{}",
                self.times[i], self.gamma[i], self.gamma_accum[i]
            )?;
        }
        Ok(())
    }
}

/// F(t) of the rotating-wave backflow rate σ = −γF, from the pair scalars
/// a (excited-population difference) and b (coherence-difference modulus).
/// Degenerate pairs (a = b = 0) yield (0.0, true).
pub fn rwa_f(t: f64, params: &SpectralParams, a: f64, b_coh: f64) -> Result<(f64, bool)> {
    let (_, accum) = rwa_decay_rate(t, params)?;
    let a2 = a * a;
    let b2 = b_coh * b_coh;
    if a2 + b2 == 0.0 {
        return Ok((0.0, true));
    }
    let num = a2 * (-1.5 * accum).exp() + b2 * (-0.5 * accum).exp();
    let den = (a2 * (-accum).exp() + b2).sqrt();
    Ok((num / den, false))
}
