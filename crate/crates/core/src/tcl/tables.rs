//! Integrand tables for the fourth-order coefficients.
//!
//! Every fourth-order coefficient is a prefactor times the triple
//! time-ordered integral T∫ = ∫₀ᵗdt₁∫₀^{t₁}dt₂∫₀^{t₂}dt₃ of a sum of rows;
//! each row is a signed product of exactly four factors. A factor is one of
//! the bath kernels C, S or a trigonometric function at the atomic
//! frequency ω₀, taken at one of nine time arguments: the differences
//! t_{ij} = t_i − t_j (with t₀ ≡ t, so e.g. `T02` = t − t₂) or the sums
//! t + t_i (`TP1`..`TP3`). On the ordered domain t ≥ t₁ ≥ t₂ ≥ t₃ ≥ 0 all
//! nine arguments are nonnegative.
//!
//! The tables are data, not code, so that the cubature driver, the
//! separable fast path and the tests all consume one transcription.

/// Time argument of a factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arg {
    /// t − t₁
    T01,
    /// t − t₂
    T02,
    /// t − t₃
    T03,
    /// t₁ − t₂
    T12,
    /// t₁ − t₃
    T13,
    /// t₂ − t₃
    T23,
    /// t + t₁
    TP1,
    /// t + t₂
    TP2,
    /// t + t₃
    TP3,
}

impl Arg {
    /// Evaluates the argument given (t, t₁, t₂, t₃).
    pub fn value(self, t: f64, t1: f64, t2: f64, t3: f64) -> f64 {
        match self {
            Arg::T01 => t - t1,
            Arg::T02 => t - t2,
            Arg::T03 => t - t3,
            Arg::T12 => t1 - t2,
            Arg::T13 => t1 - t3,
            Arg::T23 => t2 - t3,
            Arg::TP1 => t + t1,
            Arg::TP2 => t + t2,
            Arg::TP3 => t + t3,
        }
    }
}

/// One multiplicative factor of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// bath kernel C at the argument
    C(Arg),
    /// bath kernel S at the argument
    S(Arg),
    /// cos(ω₀ · argument)
    Cos(Arg),
    /// sin(ω₀ · argument)
    Sin(Arg),
}

/// A signed product of four factors.
#[derive(Debug, Clone, Copy)]
pub struct Row {
    pub weight: f64,
    pub factors: [Factor; 4],
}

/// A full integrand: prefactor × Σ rows, integrated over the ordered
/// simplex.
#[derive(Debug)]
pub struct Table {
    pub prefactor: f64,
    pub rows: &'static [Row],
}

use Arg::*;
use Factor::{Cos, Sin, C, S};

const fn row(weight: f64, factors: [Factor; 4]) -> Row {
    Row { weight, factors }
}

/// Fourth-order S₊ integrand.
pub static S_PLUS_4: Table = Table {
    prefactor: 2.0,
    rows: &[
        row(1.0, [S(T02), Sin(T03), C(T13), Sin(T12)]),
        row(-3.0, [C(T02), Cos(T03), C(T13), Sin(T12)]),
        row(1.0, [C(T02), Sin(T03), S(T13), Sin(T12)]),
        row(-1.0, [S(T02), Cos(T03), S(T13), Sin(T12)]),
        row(1.0, [S(T03), Sin(T02), C(T12), Sin(T13)]),
        row(-3.0, [C(T03), Cos(T02), C(T12), Sin(T13)]),
        row(1.0, [C(T03), Sin(T02), S(T12), Sin(T13)]),
        row(-1.0, [S(T03), Cos(T02), S(T12), Sin(T13)]),
        row(-1.0, [S(T03), Sin(T01), C(T12), Sin(T23)]),
        row(-1.0, [C(T03), Cos(T01), C(T12), Sin(T23)]),
        row(-1.0, [C(T03), Sin(T01), S(T12), Sin(T23)]),
        row(1.0, [S(T03), Cos(T01), S(T12), Sin(T23)]),
    ],
};

/// Fourth-order S₋ integrand. Differs from S₊ only in the sign of the two
/// C·cos·C rows.
pub static S_MINUS_4: Table = Table {
    prefactor: 2.0,
    rows: &[
        row(1.0, [S(T02), Sin(T03), C(T13), Sin(T12)]),
        row(1.0, [C(T02), Cos(T03), C(T13), Sin(T12)]),
        row(1.0, [C(T02), Sin(T03), S(T13), Sin(T12)]),
        row(-1.0, [S(T02), Cos(T03), S(T13), Sin(T12)]),
        row(1.0, [S(T03), Sin(T02), C(T12), Sin(T13)]),
        row(1.0, [C(T03), Cos(T02), C(T12), Sin(T13)]),
        row(1.0, [C(T03), Sin(T02), S(T12), Sin(T13)]),
        row(-1.0, [S(T03), Cos(T02), S(T12), Sin(T13)]),
        row(-1.0, [S(T03), Sin(T01), C(T12), Sin(T23)]),
        row(-1.0, [C(T03), Cos(T01), C(T12), Sin(T23)]),
        row(-1.0, [C(T03), Sin(T01), S(T12), Sin(T23)]),
        row(1.0, [S(T03), Cos(T01), S(T12), Sin(T23)]),
    ],
};

/// Fourth-order Γ₊ integrand.
pub static GAMMA_PLUS_4: Table = Table {
    prefactor: -8.0,
    rows: &[
        row(1.0, [C(T13), Sin(T03), C(T02), Sin(T12)]),
        row(1.0, [S(T13), Cos(T03), C(T02), Sin(T12)]),
        row(1.0, [C(T12), Sin(T02), C(T03), Sin(T13)]),
        row(1.0, [S(T12), Cos(T02), C(T03), Sin(T13)]),
        row(-1.0, [S(T03), C(T12), Sin(T23), Cos(T01)]),
        row(-1.0, [C(T03), S(T12), Sin(T23), Cos(T01)]),
    ],
};

/// Fourth-order Γ₋ integrand. The S·cos rows and the final pair flip sign
/// relative to Γ₊.
pub static GAMMA_MINUS_4: Table = Table {
    prefactor: -8.0,
    rows: &[
        row(1.0, [C(T13), Sin(T03), C(T02), Sin(T12)]),
        row(-1.0, [S(T13), Cos(T03), C(T02), Sin(T12)]),
        row(1.0, [C(T12), Sin(T02), C(T03), Sin(T13)]),
        row(-1.0, [S(T12), Cos(T02), C(T03), Sin(T13)]),
        row(1.0, [S(T03), C(T12), Sin(T23), Cos(T01)]),
        row(1.0, [C(T03), S(T12), Sin(T23), Cos(T01)]),
    ],
};

/// Γ₀ integrand (purely fourth order).
pub static GAMMA_ZERO_4: Table = Table {
    prefactor: 16.0,
    rows: &[
        row(1.0, [C(T02), C(T13), Sin(T03), Sin(T12)]),
        row(1.0, [S(T02), S(T13), Sin(T03), Sin(T12)]),
        row(1.0, [C(T03), C(T12), Sin(T02), Sin(T13)]),
        row(1.0, [S(T03), S(T12), Sin(T02), Sin(T13)]),
        row(1.0, [C(T03), C(T12), Sin(T01), Sin(T23)]),
        row(-1.0, [S(T03), S(T12), Sin(T01), Sin(T23)]),
    ],
};

/// Fourth-order α integrand. The first two rows take the kernel S at the
/// *sum* arguments t + t₂, t + t₃ (unlike β, which uses the differences).
pub static ALPHA_4: Table = Table {
    prefactor: -8.0,
    rows: &[
        row(1.0, [S(TP2), S(T13), Sin(TP3), Sin(T12)]),
        row(1.0, [S(TP3), S(T12), Sin(TP2), Sin(T13)]),
        row(1.0, [C(T03), C(T12), Sin(TP1), Sin(T23)]),
        row(-1.0, [S(T03), S(T12), Sin(TP1), Sin(T23)]),
    ],
};

/// Fourth-order β integrand.
pub static BETA_4: Table = Table {
    prefactor: 8.0,
    rows: &[
        row(1.0, [S(T02), S(T13), Cos(TP3), Sin(T12)]),
        row(1.0, [S(T03), S(T12), Cos(TP2), Sin(T13)]),
        row(1.0, [C(T03), C(T12), Cos(TP1), Sin(T23)]),
        row(-1.0, [S(T03), S(T12), Cos(TP1), Sin(T23)]),
    ],
};
