//! Lorentzian spectral density and its bath correlation kernels.
//!
//! The bath enters every downstream formula only through the two real
//! kernels c(t) = ∫ dω J(ω) cos ωt and s(t) = ∫ dω J(ω) sin ωt. With the
//! frequency integral taken over the full real line the Lorentzian gives
//! exact closed forms; the half-line convention (physical positive-frequency
//! bath) is available as an adaptive-quadrature mode and differs by
//! O(λ/ω_c) corrections.

use crate::quad::adaptive_gk;
use crate::{Error, Result};

/// Bath and atom parameters. `gamma0` sets the rate unit (the bundled
/// parameter sets use gamma0 = 1), `lambda` the Lorentzian half-width,
/// `delta` the atom–cavity detuning and `omega0` the atomic frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    pub gamma0: f64,
    pub lambda: f64,
    pub delta: f64,
    pub omega0: f64,
}

impl SpectralParams {
    pub fn new(gamma0: f64, lambda: f64, delta: f64, omega0: f64) -> Result<Self> {
        let p = SpectralParams {
            gamma0,
            lambda,
            delta,
            omega0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gamma0 must be positive, got {}",
                self.gamma0
            )));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParams("delta must be finite".into()));
        }
        Ok(())
    }

    /// Cavity center frequency ω_c = ω₀ − Δ.
    pub fn omega_c(&self) -> f64 {
        self.omega0 - self.delta
    }

    /// Bath correlation time τ_R = λ⁻¹.
    pub fn tau_r(&self) -> f64 {
        1.0 / self.lambda
    }

    /// System relaxation time τ_S = γ₀⁻¹.
    pub fn tau_s(&self) -> f64 {
        1.0 / self.gamma0
    }
}

/// Domain of the frequency integral defining the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyConvention {
    /// ∫ over the whole real line; closed-form kernels.
    FullLine,
    /// ∫ over [0, ∞); kernels by adaptive quadrature.
    HalfLine,
}

impl std::str::FromStr for FrequencyConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full_line" => Ok(FrequencyConvention::FullLine),
            "half_line" => Ok(FrequencyConvention::HalfLine),
            other => Err(Error::InvalidParams(format!(
                "unknown frequency_convention '{other}' (expected full_line or half_line)"
            ))),
        }
    }
}

/// J(ω) = γ₀λ² / (2π[(ω − ω_c)² + λ²]).
pub fn lorentzian_density(omega: f64, params: &SpectralParams) -> f64 {
    let d = omega - params.omega_c();
    params.gamma0 * params.lambda * params.lambda
        / (2.0 * std::f64::consts::PI * (d * d + params.lambda * params.lambda))
}

/// Closed-form factorisation amp · e^{−decay·|t|} · trig(carrier·t) of the
/// kernels, available in closed-form mode only. The repeated-integral fast
/// path keys off this.
#[derive(Debug, Clone, Copy)]
pub struct SeparableKernel {
    /// γ₀λ/2
    pub amplitude: f64,
    /// λ
    pub decay: f64,
    /// ω_c
    pub carrier: f64,
}

#[derive(Debug, Clone)]
enum KernelRepr {
    ClosedForm,
    Quadrature {
        /// lower frequency cutoff (0 for the half-line convention, −∞ side
        /// handled by the window otherwise)
        half_line: bool,
        rel_tol: f64,
    },
}

/// Evaluable bath correlation kernels c(t), s(t).
#[derive(Debug, Clone)]
pub struct CorrelationKernels {
    pub params: SpectralParams,
    repr: KernelRepr,
}

impl CorrelationKernels {
    pub fn closed_form(params: SpectralParams) -> Self {
        CorrelationKernels {
            params,
            repr: KernelRepr::ClosedForm,
        }
    }

    /// Kernels evaluated by adaptive quadrature of the defining frequency
    /// integral. `rel_tol` is relative to the kernel scale γ₀λ/2.
    pub fn quadrature(
        params: SpectralParams,
        convention: FrequencyConvention,
        rel_tol: f64,
    ) -> Self {
        CorrelationKernels {
            params,
            repr: KernelRepr::Quadrature {
                half_line: convention == FrequencyConvention::HalfLine,
                rel_tol,
            },
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.repr, KernelRepr::ClosedForm)
    }

    pub fn separable(&self) -> Option<SeparableKernel> {
        match self.repr {
            KernelRepr::ClosedForm => Some(SeparableKernel {
                amplitude: 0.5 * self.params.gamma0 * self.params.lambda,
                decay: self.params.lambda,
                carrier: self.params.omega_c(),
            }),
            KernelRepr::Quadrature { .. } => None,
        }
    }

    /// c(t); even in t.
    pub fn c(&self, t: f64) -> Result<f64> {
        match &self.repr {
            KernelRepr::ClosedForm => {
                let p = &self.params;
                Ok(0.5
                    * p.gamma0
                    * p.lambda
                    * (-p.lambda * t.abs()).exp()
                    * (p.omega_c() * t).cos())
            }
            KernelRepr::Quadrature { half_line, rel_tol } => {
                self.by_quadrature(t, *half_line, *rel_tol, true)
            }
        }
    }

    /// s(t); odd in t.
    pub fn s(&self, t: f64) -> Result<f64> {
        match &self.repr {
            KernelRepr::ClosedForm => {
                let p = &self.params;
                Ok(0.5
                    * p.gamma0
                    * p.lambda
                    * (-p.lambda * t.abs()).exp()
                    * (p.omega_c() * t).sin())
            }
            KernelRepr::Quadrature { half_line, rel_tol } => {
                self.by_quadrature(t, *half_line, *rel_tol, false)
            }
        }
    }

    fn by_quadrature(&self, t: f64, half_line: bool, rel_tol: f64, cosine: bool) -> Result<f64> {
        let p = &self.params;
        let scale = 0.5 * p.gamma0 * p.lambda;
        let abs_tol = rel_tol * scale;
        let wc = p.omega_c();
        let ta = t.abs();
        // Truncation window, one-sided distance R from the peak. Amplitude
        // tail: ∫_R^∞ J ≤ γ₀λ²/(2πR). Oscillatory tail (integration by
        // parts once): ≤ γ₀λ²/(π R² t). Take whichever admits the smaller
        // window, keep a 10x margin against the quadrature's own error.
        let eps = (abs_tol / 10.0).max(1e-300);
        let amp_r = p.gamma0 * p.lambda * p.lambda / (2.0 * std::f64::consts::PI * eps);
        let r = if ta > 0.0 {
            let ibp_r = (p.gamma0 * p.lambda * p.lambda / (std::f64::consts::PI * eps * ta)).sqrt();
            amp_r.min(ibp_r)
        } else {
            amp_r
        };
        let r = r.max(20.0 * p.lambda);
        let lo = if half_line {
            0.0_f64.max(wc - r)
        } else {
            wc - r
        };
        let hi = wc + r;
        let mut bp = Vec::new();
        // geometric cluster around the peak resolves the Lorentzian
        let mut d = p.lambda / 4.0;
        bp.push(wc);
        while d < r {
            if wc - d > lo {
                bp.push(wc - d);
            }
            if wc + d < hi {
                bp.push(wc + d);
            }
            d *= 1.5;
        }
        bp.push(lo);
        bp.push(hi);
        // uniform refinement resolves the phase ωt
        let phase = ta * (hi - lo);
        let n_osc = ((phase / 4.0).ceil() as usize).min(1 << 18);
        for i in 1..n_osc {
            bp.push(lo + (hi - lo) * i as f64 / n_osc as f64);
        }
        bp.sort_by(f64::total_cmp);
        bp.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (hi - lo));
        let f = |w: f64| {
            let j = lorentzian_density(w, p);
            if cosine {
                j * (w * ta).cos()
            } else {
                j * (w * ta).sin()
            }
        };
        let res = adaptive_gk(f, &bp, 0.0, abs_tol, 1 << 21)?;
        // restore parity for negative t
        if !cosine && t < 0.0 {
            Ok(-res.value)
        } else {
            Ok(res.value)
        }
    }
}

/// Kernels for the given parameters under the given frequency convention:
/// closed forms on the full line, adaptive quadrature on the half line.
pub fn kernels_for(params: SpectralParams, convention: FrequencyConvention) -> CorrelationKernels {
    match convention {
        FrequencyConvention::FullLine => CorrelationKernels::closed_form(params),
        FrequencyConvention::HalfLine => {
            CorrelationKernels::quadrature(params, FrequencyConvention::HalfLine, 1e-10)
        }
    }
}

/// Parses a plain-text `key = value` configuration. Recognised keys:
/// gamma0, lambda, delta, omega0, frequency_convention. Lines starting with
/// `#` and blank lines are ignored. Returns the parameters and the
/// convention (defaulting to the full line).
pub fn parse_config(text: &str) -> Result<(SpectralParams, FrequencyConvention)> {
    let mut gamma0 = 1.0;
    let mut lambda = None;
    let mut delta = None;
    let mut omega0 = None;
    let mut convention = FrequencyConvention::FullLine;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidParams(format!("config line {}: expected key = value", ln + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_num = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| {
                Error::InvalidParams(format!("config line {}: bad number '{v}'", ln + 1))
            })
        };
        match key {
            "gamma0" => gamma0 = parse_num(value)?,
            "lambda" => lambda = Some(parse_num(value)?),
            "delta" => delta = Some(parse_num(value)?),
            "omega0" => omega0 = Some(parse_num(value)?),
            "frequency_convention" => convention = value.parse()?,
            other => {
                return Err(Error::InvalidParams(format!(
                    "config line {}: unknown key '{other}'",
                    ln + 1
                )))
            }
        }
    }
    let missing =
        |name: &str| Error::InvalidParams(format!("config missing required key '{name}'"));
    let params = SpectralParams::new(
        gamma0,
        lambda.ok_or_else(|| missing("lambda"))?,
        delta.ok_or_else(|| missing("delta"))?,
        omega0.ok_or_else(|| missing("omega0"))?,
    )?;
    Ok((params, convention))
}

/// Bundled parameter sets used throughout the examples and figures
/// (`a`–`d`); all share γ₀ = 1, ω₀ = 100 and differ in bath width and
/// detuning. Returns the parameters and the default time window.
pub fn preset(tag: char) -> Result<(SpectralParams, f64)> {
    let (lambda, delta, tmax) = match tag.to_ascii_lowercase() {
        'a' | 'd' => (0.2, 2.0, 30.0),
        'b' => (5.0, 50.0, 1.5),
        'c' => (400.0, 10.0, 0.05),
        other => {
            return Err(Error::InvalidParams(format!(
                "unknown preset '{other}' (expected a, b, c or d)"
            )))
        }
    };
    Ok((SpectralParams::new(1.0, lambda, delta, 100.0)?, tmax))
}
