//! Tensor Gauss-Legendre cubature of the fourth-order integrands over the
//! ordered simplex.
//!
//! The simplex 0 ≤ t₃ ≤ t₂ ≤ t₁ ≤ t maps to the unit cube via t₁ = t·u₁,
//! t₂ = t₁·u₂, t₃ = t₂·u₃ (Jacobian t·t₁·t₂); the integrand is smooth but
//! oscillatory, so the per-axis order must exceed the total accumulated
//! phase divided by π before Gauss-Legendre converges at all. The order
//! heuristic starts just above that threshold and doubles until two
//! successive estimates agree. Order selection never looks at the kernel
//! amplitude, so rescaling the coupling rescales every node value exactly.
//!
//! Several integrand tables can be swept over the same node set at once —
//! the kernel and trigonometric values per node are shared, which is how
//! all seven coefficients are cross-checked at one time point without
//! paying seven full tensor passes.

use super::tables::{Factor, Table};
use crate::spectral::CorrelationKernels;
use crate::{Error, Result};

/// Convergence controls for the simplex cubature.
#[derive(Debug, Clone, Copy)]
pub struct CubatureOptions {
    /// relative agreement demanded between successive order doublings
    pub rel_tol: f64,
    /// per-axis order floor
    pub min_order: usize,
    /// per-axis order cap; exceeding it is a hard error
    pub max_order: usize,
}

impl Default for CubatureOptions {
    fn default() -> Self {
        CubatureOptions {
            rel_tol: 1e-4,
            min_order: 24,
            max_order: 4096,
        }
    }
}

/// Convergence metadata attached to a cubature (or mesh) evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMeta {
    /// per-axis Gauss-Legendre order, or panel count for mesh evaluations
    pub order: u32,
    /// estimated absolute error (difference of the last two refinements)
    pub error: f64,
}

enum KernelFn<'a> {
    Closed { amp: f64, lambda: f64, wc: f64 },
    Generic(&'a CorrelationKernels),
}

impl KernelFn<'_> {
    fn new(kernels: &CorrelationKernels) -> KernelFn<'_> {
        match kernels.separable() {
            Some(sk) => KernelFn::Closed {
                amp: sk.amplitude,
                lambda: sk.decay,
                wc: sk.carrier,
            },
            None => KernelFn::Generic(kernels),
        }
    }

    #[inline]
    fn c_and_s(&self, x: f64) -> Result<(f64, f64)> {
        match self {
            KernelFn::Closed { amp, lambda, wc } => {
                let env = amp * (-lambda * x.abs()).exp();
                let (sin, cos) = (wc * x).sin_cos();
                Ok((env * cos, env * sin))
            }
            KernelFn::Generic(k) => Ok((k.c(x)?, k.s(x)?)),
        }
    }

    /// magnitude scale of one kernel value, for absolute-zero floors
    fn amplitude_scale(&self) -> f64 {
        match self {
            KernelFn::Closed { amp, .. } => amp.abs(),
            KernelFn::Generic(k) => k.c(0.0).map(f64::abs).unwrap_or(1.0).max(1e-300),
        }
    }
}

const MAX_TABLES: usize = 7;

/// Evaluates every table at one simplex point, sharing kernel and
/// trigonometric values per argument across tables. `out[k]` receives the
/// row sum of `tables[k]` (prefactors not applied) scaled by `weight`.
#[inline]
#[allow(clippy::too_many_arguments)]
fn accumulate_node(
    tables: &[&Table],
    out: &mut [f64],
    kf: &KernelFn,
    omega0: f64,
    weight: f64,
    t: f64,
    t1: f64,
    t2: f64,
    t3: f64,
) -> Result<()> {
    let mut kernel_cache: [Option<(f64, f64)>; 9] = [None; 9];
    let mut trig_cache: [Option<(f64, f64)>; 9] = [None; 9];
    for (table, slot) in tables.iter().zip(out.iter_mut()) {
        let mut acc = 0.0;
        for row in table.rows {
            let mut prod = row.weight;
            for f in &row.factors {
                let (arg, is_kernel, take_second) = match *f {
                    Factor::C(a) => (a, true, false),
                    Factor::S(a) => (a, true, true),
                    Factor::Cos(a) => (a, false, false),
                    Factor::Sin(a) => (a, false, true),
                };
                let idx = arg as usize;
                let v = if is_kernel {
                    let pair = match kernel_cache[idx] {
                        Some(p) => p,
                        None => {
                            let p = kf.c_and_s(arg.value(t, t1, t2, t3))?;
                            kernel_cache[idx] = Some(p);
                            p
                        }
                    };
                    if take_second {
                        pair.1
                    } else {
                        pair.0
                    }
                } else {
                    let pair = match trig_cache[idx] {
                        Some(p) => p,
                        None => {
                            let (s, c) = (omega0 * arg.value(t, t1, t2, t3)).sin_cos();
                            trig_cache[idx] = Some((c, s));
                            (c, s)
                        }
                    };
                    if take_second {
                        pair.1
                    } else {
                        pair.0
                    }
                };
                prod *= v;
            }
            acc += prod;
        }
        *slot += weight * acc;
    }
    Ok(())
}

fn unit_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = crate::quad::gauss_legendre(order);
    // nodes on [0, 1]
    let xs: Vec<f64> = rule.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect();
    let ws: Vec<f64> = rule.weights.iter().map(|w| 0.5 * w).collect();
    (xs, ws)
}

fn tensor_pass(
    tables: &[&Table],
    kf: &KernelFn,
    omega0: f64,
    t: f64,
    orders: (usize, usize, usize),
) -> Result<Vec<f64>> {
    assert!(tables.len() <= MAX_TABLES);
    let (x1, w1) = unit_rule(orders.0);
    let (x2, w2) = unit_rule(orders.1);
    let (x3, w3) = unit_rule(orders.2);
    let m = tables.len();
    let mut total = [0.0; MAX_TABLES];
    for (i, &u1) in x1.iter().enumerate() {
        let t1 = t * u1;
        let mut sub1 = [0.0; MAX_TABLES];
        for (j, &u2) in x2.iter().enumerate() {
            let t2 = t1 * u2;
            let mut sub2 = [0.0; MAX_TABLES];
            for (k, &u3) in x3.iter().enumerate() {
                let t3 = t2 * u3;
                accumulate_node(tables, &mut sub2[..m], kf, omega0, w3[k], t, t1, t2, t3)?;
            }
            // Jacobian factor t₂ folds in here, t₁ one loop out, t at the end
            for q in 0..m {
                sub1[q] += w2[j] * sub2[q] * t2;
            }
        }
        for q in 0..m {
            total[q] += w1[i] * sub1[q] * t1;
        }
    }
    Ok(total[..m].iter().map(|v| v * t).collect())
}

/// Per-axis starting orders. Gauss-Legendre resolves an oscillatory factor
/// only once the order exceeds (accumulated phase)/π; below that it returns
/// noise. Along the innermost cube axis only t₃ moves and at most one
/// kernel argument plus one trigonometric argument contain it (arguments
/// are variable-disjoint within a row), so the phase is bounded by
/// Φ = (ω₀+|ω_c|)·t. Along the outer two axes every tᵢ moves and the bound
/// doubles. The decay λ contributes like a frequency λ/π. Orders carry
/// ~13% headroom over the 1/π threshold and never depend on the kernel
/// amplitude, keeping coupling rescaling exact.
fn axis_orders(
    t: f64,
    omega0: f64,
    wc: f64,
    lambda: f64,
    min_order: usize,
) -> (usize, usize, usize) {
    let phi = (omega0 + wc.abs() + lambda / std::f64::consts::PI) * t;
    let outer = ((0.72 * phi).ceil() as usize).max(min_order);
    let inner = ((0.36 * phi).ceil() as usize).max(min_order);
    (outer, outer, inner)
}

/// Refinement between convergence passes. Past the resolution threshold the
/// Gauss-Legendre error falls superexponentially, so a modest factor is
/// enough to expose a non-converged pass; doubling would quadruple the cost
/// of every confirmation sweep for no extra information.
const REFINE: f64 = 1.3;

fn refine(orders: (usize, usize, usize), step: u32) -> (usize, usize, usize) {
    let f = REFINE.powi(step as i32);
    let up = |n: usize| ((n as f64) * f).ceil() as usize;
    (up(orders.0), up(orders.1), up(orders.2))
}

/// Integrates each table over the ordered simplex at time `t` on shared
/// nodes, doubling the tensor order until every value agrees with its
/// predecessor to `opts.rel_tol`.
pub(crate) fn simplex_integral_multi(
    t: f64,
    kernels: &CorrelationKernels,
    tables: &[&Table],
    opts: &CubatureOptions,
) -> Result<Vec<(f64, PointMeta)>> {
    if t == 0.0 {
        return Ok(tables
            .iter()
            .map(|_| {
                (
                    0.0,
                    PointMeta {
                        order: 0,
                        error: 0.0,
                    },
                )
            })
            .collect());
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParams(format!("simplex time {t} invalid")));
    }
    let p = &kernels.params;
    let kf = KernelFn::new(kernels);
    let omega0 = p.omega0;
    // below this magnitude a value counts as zero and only absolute
    // agreement is demanded; scale-aware so coupling rescaling is exact
    let zero_floor = 1e-14 * kf.amplitude_scale().powi(2) * t.powi(3);
    let base = axis_orders(t, omega0, p.omega_c(), p.lambda, opts.min_order);
    if base.0 > opts.max_order {
        // the accumulated phase alone already demands more nodes than allowed
        return Err(Error::CubatureNonConvergence {
            order: base.0,
            achieved: f64::INFINITY,
            requested: opts.rel_tol,
        });
    }
    let mut orders = base;
    let mut prev = tensor_pass(tables, &kf, omega0, t, orders)?;
    let mut step = 1;
    loop {
        let next_orders = refine(base, step);
        if next_orders.0 > opts.max_order {
            let achieved = prev.iter().map(|v| v.abs()).fold(0.0, f64::max);
            return Err(Error::CubatureNonConvergence {
                order: orders.0,
                achieved,
                requested: opts.rel_tol,
            });
        }
        let next = tensor_pass(tables, &kf, omega0, t, next_orders)?;
        let all_ok = next.iter().zip(&prev).all(|(n, p)| {
            let diff = (n - p).abs();
            diff <= opts.rel_tol * n.abs() || diff <= zero_floor
        });
        if all_ok {
            return Ok(next
                .iter()
                .zip(&prev)
                .zip(tables)
                .map(|((n, p), table)| {
                    (
                        n * table.prefactor,
                        PointMeta {
                            order: next_orders.0 as u32,
                            error: (n - p).abs() * table.prefactor.abs(),
                        },
                    )
                })
                .collect());
        }
        prev = next;
        orders = next_orders;
        step += 1;
    }
}

/// Single-table wrapper around the shared-node sweep.
pub fn simplex_integral(
    t: f64,
    kernels: &CorrelationKernels,
    table: &Table,
    opts: &CubatureOptions,
) -> Result<(f64, PointMeta)> {
    Ok(simplex_integral_multi(t, kernels, &[table], opts)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{CorrelationKernels, SpectralParams};
    use approx::assert_relative_eq;

    /// single-row C(T02)·C(T13) with trig factors forced constant: with
    /// ω_c = 0 and ω₀ = 0 the rows collapse to elementary exponential
    /// integrals checkable by naive iterated Simpson.
    #[test]
    fn cubature_matches_elementary_limit() {
        use super::super::tables::{Arg, Factor, Row, Table};
        static TEST_TABLE: Table = Table {
            prefactor: 1.0,
            rows: &[Row {
                weight: 1.0,
                factors: [
                    Factor::C(Arg::T02),
                    Factor::C(Arg::T13),
                    Factor::Cos(Arg::T01),
                    Factor::Cos(Arg::T01),
                ],
            }],
        };
        let p = SpectralParams::new(1.0, 0.5, 100.0, 100.0).unwrap(); // ω_c = 0
        let k = CorrelationKernels::closed_form(p);
        let t = 1.3;
        let kf = KernelFn::new(&k);
        let got = tensor_pass(&[&TEST_TABLE], &kf, 0.0, t, (32, 32, 32)).unwrap()[0];
        let a = 0.5 * p.gamma0 * p.lambda;
        let l = p.lambda;
        let exact = simpson_triple(
            |t1: f64, t2: f64, t3: f64| a * a * (-(l * (t - t2))).exp() * (-(l * (t1 - t3))).exp(),
            t,
            160,
        );
        assert_relative_eq!(got, exact, max_relative = 2e-4);
    }

    /// crude but independent: iterated Simpson over the simplex
    fn simpson_triple(f: impl Fn(f64, f64, f64) -> f64, t: f64, n: usize) -> f64 {
        let simpson = |g: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize| {
            let n = if n.is_multiple_of(2) { n } else { n + 1 };
            let h = (b - a) / n as f64;
            let mut s = g(a) + g(b);
            for i in 1..n {
                s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        simpson(
            &|t1| simpson(&|t2| simpson(&|t3| f(t1, t2, t3), 0.0, t2, n), 0.0, t1, n),
            0.0,
            t,
            n,
        )
    }

    #[test]
    fn zero_time_is_zero() {
        let p = SpectralParams::new(1.0, 0.2, 2.0, 100.0).unwrap();
        let k = CorrelationKernels::closed_form(p);
        let (v, meta) = simplex_integral(
            0.0,
            &k,
            &super::super::tables::GAMMA_ZERO_4,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(meta.order, 0);
    }

    /// the multi-table sweep must agree with isolated single-table runs
    /// (same nodes, same arithmetic, only the caching is shared)
    #[test]
    fn sweep_consistent_with_single() {
        let p = SpectralParams::new(1.0, 0.4, 1.0, 6.0).unwrap();
        let k = CorrelationKernels::closed_form(p);
        let tabs = [
            &super::super::tables::GAMMA_PLUS_4,
            &super::super::tables::GAMMA_ZERO_4,
        ];
        let opts = CubatureOptions::default();
        let sweep = simplex_integral_multi(0.8, &k, &tabs, &opts).unwrap();
        for (i, tab) in tabs.iter().enumerate() {
            let (single, _) = simplex_integral(0.8, &k, tab, &opts).unwrap();
            assert_relative_eq!(sweep[i].0, single, max_relative = 1e-9);
        }
    }
}
