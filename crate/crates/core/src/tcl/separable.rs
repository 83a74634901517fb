//! Whole-trace fourth-order evaluation for separable (closed-form) kernels.
//!
//! Substituting sᵢ = t − tᵢ turns every triple integral into
//!
//! ```text
//!   ∫₀ᵗ ds₃ g₃(s₃) ∫₀^{s₃} ds₂ g₂(s₂) ∫₀^{s₂} ds₁ g₁(s₁)
//! ```
//!
//! once each integrand row is expanded so that no factor couples two
//! simplex variables. Arguments sⱼ − sᵢ and 2t − sᵢ split by angle-addition
//! and e^{−λ(2t−sᵢ)} = e^{−2λt}·e^{+λsᵢ}; everything depending on t alone
//! moves outside the integrals as a carrier (1, cos/sin of 2ω₀t, 2ω_c t,
//! 2(ω₀±ω_c)t, optionally × e^{−2λt}). What remains per variable is an atom
//! e^{±λs}·trig(ω_c s)·trig(ω₀ s), and the triple integral becomes a chain
//! of three nested cumulative integrals over the shared mesh — evaluated at
//! every output time at once. Chains repeat heavily across the seven
//! coefficient tables, so they are deduplicated and inner passes memoized.
//!
//! The per-variable atoms keep the kernel amplitude out: each row carries
//! exactly two kernel factors, so the assembled sums are scaled by
//! (γ₀λ/2)² at the end and the plan itself is parameter-free (built once,
//! statically, from the integrand tables).

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use super::tables::{self, Arg, Factor, Table};
use crate::mesh::Mesh;
use crate::spectral::SpectralParams;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Trigonometric tag for one angular scale of a per-variable atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Trig {
    One,
    Cos,
    Sin,
}

/// One per-variable factor e^{exp·λs} · wc(ω_c s) · w0(ω₀ s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct VarFun {
    pub exp: i8,
    pub wc: Trig,
    pub w0: Trig,
}

impl VarFun {
    pub(crate) const ONE: VarFun = VarFun {
        exp: 0,
        wc: Trig::One,
        w0: Trig::One,
    };
}

/// Phase of a carrier factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Cos,
    Sin,
}

/// Angular frequency of a carrier factor, in terms of the bath parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CarrierFreq {
    Zero,
    /// 2ω₀
    TwoOmega0,
    /// 2ω_c
    TwoOmegaC,
    /// 2(ω₀ + ω_c)
    TwoSum,
    /// 2(ω₀ − ω_c) = 2Δ
    TwoDelta,
}

impl CarrierFreq {
    pub fn value(&self, params: &SpectralParams) -> f64 {
        match self {
            CarrierFreq::Zero => 0.0,
            CarrierFreq::TwoOmega0 => 2.0 * params.omega0,
            CarrierFreq::TwoOmegaC => 2.0 * params.omega_c(),
            CarrierFreq::TwoSum => 2.0 * (params.omega0 + params.omega_c()),
            CarrierFreq::TwoDelta => 2.0 * (params.omega0 - params.omega_c()),
        }
    }
}

/// The t-dependent prefactor split off a fourth-order term: a fast
/// oscillation at one of five frequencies, optionally damped by e^{−2λt}.
/// Everything slow stays in the accompanying envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CarrierSlot {
    pub freq: CarrierFreq,
    pub phase: Phase,
    /// whether the slot carries the e^{−2λt} kernel tail of a 2t − sᵢ argument
    pub decayed: bool,
}

impl CarrierSlot {
    pub const UNIT: CarrierSlot = CarrierSlot {
        freq: CarrierFreq::Zero,
        phase: Phase::Cos,
        decayed: false,
    };

    pub fn value(&self, params: &SpectralParams, t: f64) -> f64 {
        let arg = self.freq.value(params) * t;
        let osc = match self.phase {
            Phase::Cos => arg.cos(),
            Phase::Sin => arg.sin(),
        };
        if self.decayed {
            osc * (-2.0 * params.lambda * t).exp()
        } else {
            osc
        }
    }
}

/// Terms sharing one carrier slot within one coefficient.
#[derive(Debug)]
pub(crate) struct SlotGroup {
    pub slot: CarrierSlot,
    /// (weight, chain index); weights exclude the table prefactor and the
    /// squared kernel amplitude
    pub terms: Vec<(f64, usize)>,
}

#[derive(Debug)]
pub(crate) struct CoefficientPlan {
    pub prefactor: f64,
    pub groups: Vec<SlotGroup>,
}

/// The complete expansion of all seven fourth-order tables over a shared,
/// deduplicated chain list.
#[derive(Debug)]
pub(crate) struct TracePlan {
    pub chains: Vec<[VarFun; 3]>,
    /// order: S₊, S₋, Γ₊, Γ₋, Γ₀, α, β
    pub coeffs: [CoefficientPlan; 7],
}

// ---------------------------------------------------------------------------
// plan construction
// ---------------------------------------------------------------------------

enum ArgKind {
    /// sᵢ
    Single(usize),
    /// sⱼ − sᵢ with i < j (nonnegative on the ordered domain)
    Diff(usize, usize),
    /// 2t − sᵢ
    TPlus(usize),
}

fn classify(arg: Arg) -> ArgKind {
    match arg {
        Arg::T01 => ArgKind::Single(0),
        Arg::T02 => ArgKind::Single(1),
        Arg::T03 => ArgKind::Single(2),
        Arg::T12 => ArgKind::Diff(0, 1),
        Arg::T13 => ArgKind::Diff(0, 2),
        Arg::T23 => ArgKind::Diff(1, 2),
        Arg::TP1 => ArgKind::TPlus(0),
        Arg::TP2 => ArgKind::TPlus(1),
        Arg::TP3 => ArgKind::TPlus(2),
    }
}

/// Carrier factors as they come off individual expansions, before the
/// product of two of them is normalized into a CarrierSlot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CarrierPrim {
    /// cos(2ω₀t)
    Cos0,
    /// sin(2ω₀t)
    Sin0,
    /// e^{−2λt} cos(2ω_c t)
    CosC,
    /// e^{−2λt} sin(2ω_c t)
    SinC,
}

#[derive(Debug, Clone)]
struct PartialTerm {
    coeff: f64,
    vars: [VarFun; 3],
    prim0: Option<CarrierPrim>,
    primc: Option<CarrierPrim>,
}

impl PartialTerm {
    fn unit(coeff: f64) -> Self {
        PartialTerm {
            coeff,
            vars: [VarFun::ONE; 3],
            prim0: None,
            primc: None,
        }
    }

    fn with_exp(mut self, var: usize, e: i8) -> Self {
        assert_eq!(self.vars[var].exp, 0, "two kernel factors share s{var}");
        self.vars[var].exp = e;
        self
    }

    fn with_wc(mut self, var: usize, t: Trig) -> Self {
        assert_eq!(
            self.vars[var].wc,
            Trig::One,
            "two kernel factors share s{var}"
        );
        self.vars[var].wc = t;
        self
    }

    fn with_w0(mut self, var: usize, t: Trig) -> Self {
        assert_eq!(
            self.vars[var].w0,
            Trig::One,
            "two trig factors share s{var}"
        );
        self.vars[var].w0 = t;
        self
    }

    fn with_prim(mut self, p: CarrierPrim) -> Self {
        match p {
            CarrierPrim::Cos0 | CarrierPrim::Sin0 => {
                assert!(self.prim0.is_none(), "two ω₀ carriers in one term");
                self.prim0 = Some(p);
            }
            CarrierPrim::CosC | CarrierPrim::SinC => {
                assert!(self.primc.is_none(), "two ω_c carriers in one term");
                self.primc = Some(p);
            }
        }
        self
    }
}

/// Expands one factor applied to each partial term accumulated so far.
fn apply_factor(acc: Vec<PartialTerm>, factor: &Factor) -> Vec<PartialTerm> {
    let mut out = Vec::with_capacity(acc.len() * 2);
    for term in acc {
        match *factor {
            // kernel factors: amplitude spun off, e^{−λ·arg}·trig(ω_c·arg)
            Factor::C(arg) => match classify(arg) {
                ArgKind::Single(i) => {
                    out.push(term.clone().with_exp(i, -1).with_wc(i, Trig::Cos));
                }
                ArgKind::Diff(i, j) => {
                    // e^{−λ(s_j−s_i)} [cos_j cos_i + sin_j sin_i] at ω_c
                    out.push(
                        term.clone()
                            .with_exp(j, -1)
                            .with_exp(i, 1)
                            .with_wc(j, Trig::Cos)
                            .with_wc(i, Trig::Cos),
                    );
                    out.push(
                        term.clone()
                            .with_exp(j, -1)
                            .with_exp(i, 1)
                            .with_wc(j, Trig::Sin)
                            .with_wc(i, Trig::Sin),
                    );
                }
                ArgKind::TPlus(i) => {
                    // e^{−λ(2t−s_i)} cos(2ω_c t − ω_c s_i)
                    out.push(
                        term.clone()
                            .with_exp(i, 1)
                            .with_wc(i, Trig::Cos)
                            .with_prim(CarrierPrim::CosC),
                    );
                    out.push(
                        term.clone()
                            .with_exp(i, 1)
                            .with_wc(i, Trig::Sin)
                            .with_prim(CarrierPrim::SinC),
                    );
                }
            },
            Factor::S(arg) => match classify(arg) {
                ArgKind::Single(i) => {
                    out.push(term.clone().with_exp(i, -1).with_wc(i, Trig::Sin));
                }
                ArgKind::Diff(i, j) => {
                    // sin(ω_c(s_j−s_i)) = sin_j cos_i − cos_j sin_i
                    out.push(
                        term.clone()
                            .with_exp(j, -1)
                            .with_exp(i, 1)
                            .with_wc(j, Trig::Sin)
                            .with_wc(i, Trig::Cos),
                    );
                    let mut neg = term
                        .clone()
                        .with_exp(j, -1)
                        .with_exp(i, 1)
                        .with_wc(j, Trig::Cos)
                        .with_wc(i, Trig::Sin);
                    neg.coeff = -neg.coeff;
                    out.push(neg);
                }
                ArgKind::TPlus(i) => {
                    // sin(2ω_c t − ω_c s_i) = sinC cos_i − cosC sin_i
                    out.push(
                        term.clone()
                            .with_exp(i, 1)
                            .with_wc(i, Trig::Cos)
                            .with_prim(CarrierPrim::SinC),
                    );
                    let mut neg = term
                        .clone()
                        .with_exp(i, 1)
                        .with_wc(i, Trig::Sin)
                        .with_prim(CarrierPrim::CosC);
                    neg.coeff = -neg.coeff;
                    out.push(neg);
                }
            },
            // bare trig factors at ω₀
            Factor::Cos(arg) => match classify(arg) {
                ArgKind::Single(i) => out.push(term.clone().with_w0(i, Trig::Cos)),
                ArgKind::Diff(i, j) => {
                    out.push(term.clone().with_w0(j, Trig::Cos).with_w0(i, Trig::Cos));
                    out.push(term.clone().with_w0(j, Trig::Sin).with_w0(i, Trig::Sin));
                }
                ArgKind::TPlus(i) => {
                    out.push(
                        term.clone()
                            .with_w0(i, Trig::Cos)
                            .with_prim(CarrierPrim::Cos0),
                    );
                    out.push(
                        term.clone()
                            .with_w0(i, Trig::Sin)
                            .with_prim(CarrierPrim::Sin0),
                    );
                }
            },
            Factor::Sin(arg) => match classify(arg) {
                ArgKind::Single(i) => out.push(term.clone().with_w0(i, Trig::Sin)),
                ArgKind::Diff(i, j) => {
                    out.push(term.clone().with_w0(j, Trig::Sin).with_w0(i, Trig::Cos));
                    let mut neg = term.clone().with_w0(j, Trig::Cos).with_w0(i, Trig::Sin);
                    neg.coeff = -neg.coeff;
                    out.push(neg);
                }
                ArgKind::TPlus(i) => {
                    out.push(
                        term.clone()
                            .with_w0(i, Trig::Cos)
                            .with_prim(CarrierPrim::Sin0),
                    );
                    let mut neg = term
                        .clone()
                        .with_w0(i, Trig::Sin)
                        .with_prim(CarrierPrim::Cos0);
                    neg.coeff = -neg.coeff;
                    out.push(neg);
                }
            },
        }
    }
    out
}

/// Normalizes the ≤2 carrier factors of a term into weighted slots
/// (product-to-sum when both an ω₀ and an ω_c carrier are present).
fn slots_for(prim0: Option<CarrierPrim>, primc: Option<CarrierPrim>) -> Vec<(f64, CarrierSlot)> {
    use CarrierFreq::*;
    use Phase::*;
    let slot = |freq, phase, decayed| CarrierSlot {
        freq,
        phase,
        decayed,
    };
    match (prim0, primc) {
        (None, None) => vec![(1.0, CarrierSlot::UNIT)],
        (Some(CarrierPrim::Cos0), None) => vec![(1.0, slot(TwoOmega0, Cos, false))],
        (Some(CarrierPrim::Sin0), None) => vec![(1.0, slot(TwoOmega0, Sin, false))],
        (None, Some(CarrierPrim::CosC)) => vec![(1.0, slot(TwoOmegaC, Cos, true))],
        (None, Some(CarrierPrim::SinC)) => vec![(1.0, slot(TwoOmegaC, Sin, true))],
        // cos A cos B = ½cos(A−B) + ½cos(A+B), A = 2ω₀t, B = 2ω_c t
        (Some(CarrierPrim::Cos0), Some(CarrierPrim::CosC)) => vec![
            (0.5, slot(TwoDelta, Cos, true)),
            (0.5, slot(TwoSum, Cos, true)),
        ],
        // cos A sin B = ½sin(A+B) − ½sin(A−B)
        (Some(CarrierPrim::Cos0), Some(CarrierPrim::SinC)) => vec![
            (0.5, slot(TwoSum, Sin, true)),
            (-0.5, slot(TwoDelta, Sin, true)),
        ],
        // sin A cos B = ½sin(A+B) + ½sin(A−B)
        (Some(CarrierPrim::Sin0), Some(CarrierPrim::CosC)) => vec![
            (0.5, slot(TwoSum, Sin, true)),
            (0.5, slot(TwoDelta, Sin, true)),
        ],
        // sin A sin B = ½cos(A−B) − ½cos(A+B)
        (Some(CarrierPrim::Sin0), Some(CarrierPrim::SinC)) => vec![
            (0.5, slot(TwoDelta, Cos, true)),
            (-0.5, slot(TwoSum, Cos, true)),
        ],
        _ => unreachable!("prim families enforced at insertion"),
    }
}

fn expand_table(
    table: &Table,
    chains: &mut Vec<[VarFun; 3]>,
    chain_index: &mut HashMap<[VarFun; 3], usize>,
) -> CoefficientPlan {
    // slot → chain → accumulated weight
    let mut grouped: BTreeMap<CarrierSlot, BTreeMap<usize, f64>> = BTreeMap::new();
    for row in table.rows {
        let mut terms = vec![PartialTerm::unit(row.weight)];
        for factor in &row.factors {
            terms = apply_factor(terms, factor);
        }
        for term in terms {
            let idx = *chain_index.entry(term.vars).or_insert_with(|| {
                chains.push(term.vars);
                chains.len() - 1
            });
            for (w, slot) in slots_for(term.prim0, term.primc) {
                *grouped.entry(slot).or_default().entry(idx).or_insert(0.0) += term.coeff * w;
            }
        }
    }
    let groups = grouped
        .into_iter()
        .map(|(slot, terms)| SlotGroup {
            slot,
            terms: terms
                .into_iter()
                .map(|(i, w)| (w, i))
                .filter(|(w, _)| *w != 0.0)
                .collect(),
        })
        .filter(|g| !g.terms.is_empty())
        .collect();
    CoefficientPlan {
        prefactor: table.prefactor,
        groups,
    }
}

pub(crate) fn trace_plan() -> &'static TracePlan {
    static PLAN: OnceLock<TracePlan> = OnceLock::new();
    PLAN.get_or_init(|| {
        let mut chains = Vec::new();
        let mut index = HashMap::new();
        let coeffs = [
            expand_table(&tables::S_PLUS_4, &mut chains, &mut index),
            expand_table(&tables::S_MINUS_4, &mut chains, &mut index),
            expand_table(&tables::GAMMA_PLUS_4, &mut chains, &mut index),
            expand_table(&tables::GAMMA_MINUS_4, &mut chains, &mut index),
            expand_table(&tables::GAMMA_ZERO_4, &mut chains, &mut index),
            expand_table(&tables::ALPHA_4, &mut chains, &mut index),
            expand_table(&tables::BETA_4, &mut chains, &mut index),
        ];
        TracePlan { chains, coeffs }
    })
}

// ---------------------------------------------------------------------------
// chain evaluation on a mesh
// ---------------------------------------------------------------------------

struct AtomBank {
    exp_pos: Vec<f64>,
    exp_neg: Vec<f64>,
    cos_c: Vec<f64>,
    sin_c: Vec<f64>,
    cos_0: Vec<f64>,
    sin_0: Vec<f64>,
}

impl AtomBank {
    fn new(mesh: &Mesh, lambda: f64, wc: f64, omega0: f64) -> Self {
        AtomBank {
            exp_pos: mesh.sample(|s| (lambda * s).exp()),
            exp_neg: mesh.sample(|s| (-lambda * s).exp()),
            cos_c: mesh.sample(|s| (wc * s).cos()),
            sin_c: mesh.sample(|s| (wc * s).sin()),
            cos_0: mesh.sample(|s| (omega0 * s).cos()),
            sin_0: mesh.sample(|s| (omega0 * s).sin()),
        }
    }

    /// node values of one per-variable atom
    fn atom(&self, vf: VarFun, n: usize) -> Vec<f64> {
        let mut v = vec![1.0; n];
        match vf.exp {
            1 => mul_assign(&mut v, &self.exp_pos),
            -1 => mul_assign(&mut v, &self.exp_neg),
            _ => {}
        }
        match vf.wc {
            Trig::Cos => mul_assign(&mut v, &self.cos_c),
            Trig::Sin => mul_assign(&mut v, &self.sin_c),
            Trig::One => {}
        }
        match vf.w0 {
            Trig::Cos => mul_assign(&mut v, &self.cos_0),
            Trig::Sin => mul_assign(&mut v, &self.sin_0),
            Trig::One => {}
        }
        v
    }
}

fn mul_assign(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d *= s;
    }
}

/// Evaluates every chain at every mesh breakpoint. Output is indexed
/// `[chain][breakpoint]`. Deterministic: each chain is produced by the same
/// sequence of floating-point operations however the work is scheduled.
pub(crate) fn evaluate_chains(
    chains: &[[VarFun; 3]],
    mesh: &Mesh,
    lambda: f64,
    wc: f64,
    omega0: f64,
) -> Vec<Vec<f64>> {
    let n = mesh.node_count();
    let atoms = AtomBank::new(mesh, lambda, wc, omega0);

    // innermost pass memo: P1 = ∫₀^x g₁, one per distinct g₁
    let mut p1: HashMap<VarFun, Vec<f64>> = HashMap::new();
    for chain in chains {
        p1.entry(chain[0])
            .or_insert_with_key(|&g1| mesh.cumulative(&atoms.atom(g1, n)));
    }

    // group chains sharing (g₁, g₂) so the middle pass runs once per group
    let mut groups: BTreeMap<(VarFun, VarFun), Vec<(usize, VarFun)>> = BTreeMap::new();
    for (idx, chain) in chains.iter().enumerate() {
        groups
            .entry((chain[0], chain[1]))
            .or_default()
            .push((idx, chain[2]));
    }
    let groups: Vec<_> = groups.into_iter().collect();

    let run_group = |((g1, g2), thirds): &((VarFun, VarFun), Vec<(usize, VarFun)>)| {
        let mut mid = atoms.atom(*g2, n);
        mul_assign(&mut mid, &p1[g1]);
        let p2 = mesh.cumulative(&mid);
        thirds
            .iter()
            .map(|(idx, g3)| {
                let mut outer = atoms.atom(*g3, n);
                mul_assign(&mut outer, &p2);
                let p3 = mesh.cumulative(&outer);
                (*idx, mesh.at_breakpoints(&p3))
            })
            .collect::<Vec<_>>()
    };

    #[cfg(feature = "parallel")]
    let per_group: Vec<Vec<(usize, Vec<f64>)>> = if crate::exec::sequential() {
        groups.iter().map(run_group).collect()
    } else {
        groups.par_iter().map(run_group).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_group: Vec<Vec<(usize, Vec<f64>)>> = groups.iter().map(run_group).collect();

    let mut out = vec![Vec::new(); chains.len()];
    for group in per_group {
        for (idx, vals) in group {
            out[idx] = vals;
        }
    }
    out
}
