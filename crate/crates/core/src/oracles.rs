//! Brute-force reference implementations used to validate the main
//! numerics. Nothing here is fast, shares quadrature machinery with the
//! production path, or reuses the assembled integrand tables: the
//! fourth-order integrands below are a second, independent transcription
//! of the same closed expressions.

use nalgebra::{Matrix2, Matrix4, SMatrix};
use num_complex::Complex64;

use crate::dynamics::{BlochVector, Trajectory};
use crate::measures::trace_distance;
use crate::spectral::CorrelationKernels;
use crate::tcl::{CoefficientSet, FourthOrderSelector};
use crate::{Error, Result};

type M2 = Matrix2<Complex64>;
type M4 = Matrix4<Complex64>;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Basis order (|0⟩, |1⟩): ground first, so σ₊ = |1⟩⟨0| raises.
pub fn sigma_plus() -> M2 {
    M2::new(re(0.0), re(0.0), re(1.0), re(0.0))
}

pub fn sigma_minus() -> M2 {
    M2::new(re(0.0), re(1.0), re(0.0), re(0.0))
}

pub fn sigma_x() -> M2 {
    M2::new(re(0.0), re(1.0), re(1.0), re(0.0))
}

/// σ_y = i(σ₋ − σ₊) in this basis order.
pub fn sigma_y() -> M2 {
    M2::new(
        re(0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
        re(0.0),
    )
}

pub fn sigma_z() -> M2 {
    M2::new(re(-1.0), re(0.0), re(0.0), re(1.0))
}

/// ρ = ½(I + b·σ)
pub fn bloch_to_rho(b: &BlochVector) -> M2 {
    let mut rho = M2::identity();
    rho += sigma_x() * re(b.bx) + sigma_y() * re(b.by) + sigma_z() * re(b.bz);
    rho * re(0.5)
}

/// b_j = Tr(ρ σ_j); imaginary parts vanish for Hermitian ρ.
pub fn rho_to_bloch(rho: &M2) -> BlochVector {
    BlochVector::new(
        (rho * sigma_x()).trace().re,
        (rho * sigma_y()).trace().re,
        (rho * sigma_z()).trace().re,
    )
}

/// The complete generator applied to an arbitrary 2×2 matrix: Lamb-shift
/// commutator, the three secular dissipator lines, and the nonsecular
/// pair (α+iβ)σ₊ρσ₊ + h.c.
pub fn apply_generator(c: &CoefficientSet, rho: &M2) -> M2 {
    let sp = sigma_plus();
    let sm = sigma_minus();
    let p1 = sp * sm; // |1⟩⟨1|
    let p0 = sm * sp; // |0⟩⟨0|

    let h = p1 * re(c.s_plus.total()) + p0 * re(c.s_minus.total());
    let mut out = (h * rho - rho * h) * Complex64::new(0.0, -1.0);

    let half = re(0.5);
    out += (sm * rho * sp - (p1 * rho + rho * p1) * half) * re(c.gamma_minus.total());
    out += (sp * rho * sm - (p0 * rho + rho * p0) * half) * re(c.gamma_plus.total());
    out += (p1 * rho * p1 - (p1 * rho + rho * p1) * half) * re(c.gamma_zero.total());

    let ns = Complex64::new(c.alpha.total(), c.beta.total());
    out += sp * rho * sp * ns + sm * rho * sm * ns.conj();
    out
}

/// |Φ⟩⟨Φ| with |Φ⟩ = (|01⟩ + |10⟩)/√2, system factor first.
pub fn choi_state() -> M4 {
    let mut m = M4::zeros();
    for i in [1, 2] {
        for j in [1, 2] {
            m[(i, j)] = re(0.5);
        }
    }
    m
}

/// (L ⊗ I) applied blockwise: for fixed environment indices the system
/// slice is a 2×2 matrix fed to the generator.
fn apply_left<F: Fn(&M2) -> M2>(l: F, m: &M4) -> M4 {
    let mut out = M4::zeros();
    for env_row in 0..2 {
        for env_col in 0..2 {
            let slice = M2::new(
                m[(env_row, env_col)],
                m[(env_row, 2 + env_col)],
                m[(2 + env_row, env_col)],
                m[(2 + env_row, 2 + env_col)],
            );
            let mapped = l(&slice);
            out[(env_row, env_col)] = mapped[(0, 0)];
            out[(env_row, 2 + env_col)] = mapped[(0, 1)];
            out[(2 + env_row, env_col)] = mapped[(1, 0)];
            out[(2 + env_row, 2 + env_col)] = mapped[(1, 1)];
        }
    }
    out
}

/// Trace norm of a Hermitian 4×4 via the real-symmetric embedding
/// [[Re, −Im], [Im, Re]], whose spectrum is the Hermitian spectrum
/// doubled.
fn trace_norm_hermitian(m: &M4) -> f64 {
    let sym = (m + m.adjoint()) * re(0.5);
    let mut embed = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            embed[(i, j)] = sym[(i, j)].re;
            embed[(4 + i, 4 + j)] = sym[(i, j)].re;
            embed[(i, 4 + j)] = -sym[(i, j)].im;
            embed[(4 + i, j)] = sym[(i, j)].im;
        }
    }
    let eigen = nalgebra::SymmetricEigen::new(embed);
    0.5 * eigen.eigenvalues.iter().map(|l| l.abs()).sum::<f64>()
}

/// The ε-limit construction of the indivisibility rate:
/// (‖[I + ε(L⊗I)]|Φ⟩⟨Φ|‖₁ − 1)/ε.
pub fn choi_g_oracle(c: &CoefficientSet, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1e-3) {
        return Err(Error::InvalidParams(format!(
            "epsilon {epsilon} outside (0, 1e-3]"
        )));
    }
    let phi = choi_state();
    let perturbed = phi + apply_left(|rho| apply_generator(c, rho), &phi) * re(epsilon);
    Ok((trace_norm_hermitian(&perturbed) - 1.0) / epsilon)
}

/// Richardson extrapolation 2f(ε/2) − f(ε) cancels the O(ε) term.
pub fn choi_g_richardson(c: &CoefficientSet, epsilon: f64) -> Result<f64> {
    Ok(2.0 * choi_g_oracle(c, 0.5 * epsilon)? - choi_g_oracle(c, epsilon)?)
}

/// Midpoint Riemann evaluation of the ordered triple integral
/// T∫ = ∫₀ᵗdt₁∫₀^{t₁}dt₂∫₀^{t₂}dt₃ of the selected fourth-order
/// integrand, transcribed directly from the closed expressions.
///
/// The sum runs over all n³ midpoint cells of the cube [0,t]³; sorting
/// each midpoint into descending order and dividing by 3! turns the cube
/// sum into the simplex integral without any boundary-cell bookkeeping.
pub fn simplex_riemann_oracle(
    t: f64,
    kernels: &CorrelationKernels,
    which: FourthOrderSelector,
    n: usize,
) -> Result<f64> {
    if n < 50 {
        return Err(Error::InvalidParams(format!(
            "riemann resolution {n} below the supported minimum 50"
        )));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let w0 = kernels.params.omega0;
    let cker = |x: f64| kernels.c(x).expect("closed-form kernel is total");
    let sker = |x: f64| kernels.s(x).expect("closed-form kernel is total");

    let integrand = |t1: f64, t2: f64, t3: f64| -> f64 {
        let (t01, t02, t03) = (t - t1, t - t2, t - t3);
        let (t12, t13, t23) = (t1 - t2, t1 - t3, t2 - t3);
        match which {
            FourthOrderSelector::SPlus => {
                2.0 * ((sker(t02) * (w0 * t03).sin() - 3.0 * cker(t02) * (w0 * t03).cos())
                    * cker(t13)
                    * (w0 * t12).sin()
                    + (cker(t02) * (w0 * t03).sin() - sker(t02) * (w0 * t03).cos())
                        * sker(t13)
                        * (w0 * t12).sin()
                    + (sker(t03) * (w0 * t02).sin() - 3.0 * cker(t03) * (w0 * t02).cos())
                        * cker(t12)
                        * (w0 * t13).sin()
                    + (cker(t03) * (w0 * t02).sin() - sker(t03) * (w0 * t02).cos())
                        * sker(t12)
                        * (w0 * t13).sin()
                    + (-sker(t03) * (w0 * t01).sin() - cker(t03) * (w0 * t01).cos())
                        * cker(t12)
                        * (w0 * t23).sin()
                    + (-cker(t03) * (w0 * t01).sin() + sker(t03) * (w0 * t01).cos())
                        * sker(t12)
                        * (w0 * t23).sin())
            }
            FourthOrderSelector::SMinus => {
                2.0 * ((sker(t02) * (w0 * t03).sin() + cker(t02) * (w0 * t03).cos())
                    * cker(t13)
                    * (w0 * t12).sin()
                    + (cker(t02) * (w0 * t03).sin() - sker(t02) * (w0 * t03).cos())
                        * sker(t13)
                        * (w0 * t12).sin()
                    + (sker(t03) * (w0 * t02).sin() + cker(t03) * (w0 * t02).cos())
                        * cker(t12)
                        * (w0 * t13).sin()
                    + (cker(t03) * (w0 * t02).sin() - sker(t03) * (w0 * t02).cos())
                        * sker(t12)
                        * (w0 * t13).sin()
                    + (-sker(t03) * (w0 * t01).sin() - cker(t03) * (w0 * t01).cos())
                        * cker(t12)
                        * (w0 * t23).sin()
                    + (-cker(t03) * (w0 * t01).sin() + sker(t03) * (w0 * t01).cos())
                        * sker(t12)
                        * (w0 * t23).sin())
            }
            FourthOrderSelector::GammaPlus | FourthOrderSelector::GammaMinus => {
                let pm = if which == FourthOrderSelector::GammaPlus {
                    1.0
                } else {
                    -1.0
                };
                -8.0 * ((cker(t13) * (w0 * t03).sin() + pm * sker(t13) * (w0 * t03).cos())
                    * cker(t02)
                    * (w0 * t12).sin()
                    + (cker(t12) * (w0 * t02).sin() + pm * sker(t12) * (w0 * t02).cos())
                        * cker(t03)
                        * (w0 * t13).sin()
                    - pm * (sker(t03) * cker(t12) + cker(t03) * sker(t12))
                        * (w0 * t23).sin()
                        * (w0 * t01).cos())
            }
            FourthOrderSelector::GammaZero => {
                16.0 * ((cker(t02) * cker(t13) + sker(t02) * sker(t13))
                    * (w0 * t03).sin()
                    * (w0 * t12).sin()
                    + (cker(t03) * cker(t12) + sker(t03) * sker(t12))
                        * (w0 * t02).sin()
                        * (w0 * t13).sin()
                    + (cker(t03) * cker(t12) - sker(t03) * sker(t12))
                        * (w0 * t01).sin()
                        * (w0 * t23).sin())
            }
            FourthOrderSelector::Alpha => {
                -8.0 * (sker(t + t2) * sker(t13) * (w0 * (t + t3)).sin() * (w0 * t12).sin()
                    + sker(t + t3) * sker(t12) * (w0 * (t + t2)).sin() * (w0 * t13).sin()
                    + (cker(t03) * cker(t12) - sker(t03) * sker(t12))
                        * (w0 * (t + t1)).sin()
                        * (w0 * t23).sin())
            }
            FourthOrderSelector::Beta => {
                8.0 * (sker(t02) * sker(t13) * (w0 * (t + t3)).cos() * (w0 * t12).sin()
                    + sker(t03) * sker(t12) * (w0 * (t + t2)).cos() * (w0 * t13).sin()
                    + (cker(t03) * cker(t12) - sker(t03) * sker(t12))
                        * (w0 * (t + t1)).cos()
                        * (w0 * t23).sin())
            }
        }
    };

    // The cube sum is invariant under coordinate permutation once the
    // arguments are sorted, so only ordered index triples are evaluated,
    // weighted by their orbit size (6, 3 or 1). Identical sum, 6× fewer
    // integrand calls.
    let h = t / n as f64;
    let mut total = 0.0;
    for i1 in 0..n {
        let x1 = (i1 as f64 + 0.5) * h;
        for i2 in 0..=i1 {
            let x2 = (i2 as f64 + 0.5) * h;
            for i3 in 0..=i2 {
                let x3 = (i3 as f64 + 0.5) * h;
                let weight = if i1 == i2 && i2 == i3 {
                    1.0
                } else if i1 == i2 || i2 == i3 {
                    3.0
                } else {
                    6.0
                };
                total += weight * integrand(x1, x2, x3);
            }
        }
    }
    Ok(total * h * h * h / 6.0)
}

/// d/dt of the trace distance along two trajectories: centered in the
/// interior, one-sided at the ends.
pub fn finite_difference_sigma(t1: &Trajectory, t2: &Trajectory) -> Result<Vec<f64>> {
    if t1.times != t2.times {
        return Err(Error::InvalidGrid(
            "trajectories sampled on different grids".into(),
        ));
    }
    let n = t1.times.len();
    if n < 3 {
        return Err(Error::InvalidGrid(
            "finite differences need at least 3 samples".into(),
        ));
    }
    let d: Vec<f64> = (0..n)
        .map(|i| trace_distance(&t1.states[i], &t2.states[i]))
        .collect();
    let ts = &t1.times;
    let mut out = Vec::with_capacity(n);
    out.push((d[1] - d[0]) / (ts[1] - ts[0]));
    for i in 1..n - 1 {
        out.push((d[i + 1] - d[i - 1]) / (ts[i + 1] - ts[i - 1]));
    }
    out.push((d[n - 1] - d[n - 2]) / (ts[n - 1] - ts[n - 2]));
    Ok(out)
}
