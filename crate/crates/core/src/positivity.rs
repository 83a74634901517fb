//! Complete-positivity diagnostics for the secular-plus-nonsecular map.
//!
//! Everything here is a prefix integral of the coefficient totals on the
//! trace grid, accumulated by the trapezoidal rule:
//!
//! * Θ = ½∫(Γ₋+Γ₊+Γ₀), Λ = ∫(Γ₋+Γ₊), χ = e^{−2Θ}, A = e^{−Λ}
//! * κ = A(t)·∫₀ᵗ [Γ₊−Γ₋]·e^{Λ(s)} ds
//! * θ_ns = 2∫₀ᵗ √(α²+β²) ds — the 2ω₀ carrier cancels inside the root,
//!   so the integrand is slow and the grid resolution is adequate.
//!
//! The necessary conditions are Λ ≥ 0 and 2Θ ≥ Λ; the sufficient one is
//! χ·cosh θ ≤ 1 + A² − κ² − 2|A − χ|, and G = (1−A)² + 2χ − κ² − χ·cosh θ
//! is its scalar witness (sufficient ⇒ G ≥ 0 by algebra). The relaxed
//! secular condition drops θ and one χ: (1−A)² + χ − κ² ≥ 0.

use std::io::Write;

use crate::tcl::CoefficientTrace;

/// Diagnostics at a single grid time.
#[derive(Debug, Clone, Copy)]
pub struct PositivityPoint {
    pub t: f64,
    pub theta: f64,
    pub lambda: f64,
    pub chi: f64,
    pub a: f64,
    pub kappa: f64,
    pub theta_ns: f64,
    pub g: f64,
    /// Λ ≥ 0
    pub nec1: bool,
    /// 2Θ ≥ Λ
    pub nec2: bool,
    /// χ cosh θ ≤ 1 + A² − κ² − 2|A − χ|
    pub suff: bool,
    /// (1−A)² + χ − κ² ≥ 0
    pub relaxed: bool,
}

#[derive(Debug, Clone)]
pub struct PositivityReport {
    pub points: Vec<PositivityPoint>,
}

/// Evaluates the diagnostics over the full trace grid.
pub fn positivity_report(trace: &CoefficientTrace) -> PositivityReport {
    let n = trace.grid.len();
    let mut points = Vec::with_capacity(n);

    let sum2: Vec<f64> = trace
        .sets
        .iter()
        .map(|c| c.gamma_minus.total() + c.gamma_plus.total())
        .collect();
    let sum3: Vec<f64> = trace
        .sets
        .iter()
        .zip(&sum2)
        .map(|(c, s2)| s2 + c.gamma_zero.total())
        .collect();
    let gdiff: Vec<f64> = trace
        .sets
        .iter()
        .map(|c| c.gamma_plus.total() - c.gamma_minus.total())
        .collect();
    let ns_mag: Vec<f64> = trace
        .sets
        .iter()
        .map(|c| c.alpha.total().hypot(c.beta.total()))
        .collect();

    // Λ prefix first: κ's integrand needs e^{Λ(s)} at earlier nodes.
    let mut lambda = vec![0.0; n];
    for i in 1..n {
        let h = trace.grid[i] - trace.grid[i - 1];
        lambda[i] = lambda[i - 1] + 0.5 * h * (sum2[i - 1] + sum2[i]);
    }

    let (mut theta, mut kappa_int, mut theta_ns) = (0.0, 0.0, 0.0);
    for i in 0..n {
        if i > 0 {
            let h = trace.grid[i] - trace.grid[i - 1];
            theta += 0.25 * h * (sum3[i - 1] + sum3[i]);
            kappa_int +=
                0.5 * h * (gdiff[i - 1] * lambda[i - 1].exp() + gdiff[i] * lambda[i].exp());
            theta_ns += h * (ns_mag[i - 1] + ns_mag[i]);
        }
        let chi = (-2.0 * theta).exp();
        let a = (-lambda[i]).exp();
        let kappa = a * kappa_int;
        let cosh_theta = theta_ns.cosh();
        let g = (1.0 - a) * (1.0 - a) + 2.0 * chi - kappa * kappa - chi * cosh_theta;
        let suff = chi * cosh_theta <= 1.0 + a * a - kappa * kappa - 2.0 * (a - chi).abs();
        if suff {
            // suff ⇒ G ≥ 0 algebraically; leave slack for the two
            // independently rounded evaluations
            let scale = 1.0 + kappa * kappa + chi * cosh_theta;
            assert!(g >= -1e-12 * scale, "sufficient condition held but G = {g}");
        }
        points.push(PositivityPoint {
            t: trace.grid[i],
            theta,
            lambda: lambda[i],
            chi,
            a,
            kappa,
            theta_ns,
            g,
            nec1: lambda[i] >= 0.0,
            nec2: 2.0 * theta >= lambda[i],
            suff,
            relaxed: (1.0 - a) * (1.0 - a) + chi - kappa * kappa >= 0.0,
        });
    }
    PositivityReport { points }
}

/// The relaxed secular condition alone, per grid point.
pub fn relaxed_secular_check(trace: &CoefficientTrace) -> Vec<bool> {
    positivity_report(trace)
        .points
        .iter()
        .map(|p| p.relaxed)
        .collect()
}

impl PositivityReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "t,Theta,Lambda,chi,A,kappa,theta_ns,G,nec1,nec2,suff,relaxed"
        )?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                p.t,
                p.theta,
                p.lambda,
                p.chi,
                p.a,
                p.kappa,
                p.theta_ns,
                p.g,
                p.nec1 as u8,
                p.nec2 as u8,
                p.suff as u8,
                p.relaxed as u8
            )?;
        }
        Ok(())
    }

    /// true iff G > 0 strictly on (0, t_upper]
    pub fn g_positive_on(&self, t_upper: f64) -> bool {
        self.points
            .iter()
            .filter(|p| p.t > 0.0 && p.t <= t_upper)
            .all(|p| p.g > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralParams;
    use crate::tcl::{self, CoefficientSet, CoefficientTrace, TclOrder};
    use approx::assert_relative_eq;

    fn zero_trace(n: usize) -> CoefficientTrace {
        let grid = tcl::time_grid(5.0, n);
        let sets = grid.iter().map(|&t| CoefficientSet::zero(t)).collect();
        let params = SpectralParams::new(1.0, 0.2, 2.0, 100.0).unwrap();
        CoefficientTrace::from_sets(params, TclOrder::Tcl4, sets)
    }

    #[test]
    fn starts_at_unit_g_with_all_conditions() {
        let p = SpectralParams::new(1.0, 0.2, 2.0, 100.0).unwrap();
        let trace = tcl::evaluate_trace(&p, &tcl::time_grid(3.0, 61), TclOrder::Tcl4).unwrap();
        let rep = positivity_report(&trace);
        let p0 = &rep.points[0];
        assert_eq!(p0.t, 0.0);
        assert_eq!(p0.chi, 1.0);
        assert_eq!(p0.a, 1.0);
        assert_eq!(p0.kappa, 0.0);
        assert_eq!(p0.theta_ns, 0.0);
        assert_eq!(p0.g, 1.0);
        assert!(p0.nec1 && p0.nec2 && p0.suff && p0.relaxed);
    }

    #[test]
    fn zero_coefficients_keep_g_at_one() {
        let rep = positivity_report(&zero_trace(40));
        for p in &rep.points {
            assert_eq!(p.g, 1.0);
            assert!(p.nec1 && p.nec2 && p.suff && p.relaxed);
        }
        assert!(relaxed_secular_check(&zero_trace(11)).iter().all(|&b| b));
    }

    #[test]
    fn theta_ns_is_nondecreasing() {
        let p = SpectralParams::new(1.0, 0.2, 2.0, 100.0).unwrap();
        let trace = tcl::evaluate_trace(&p, &tcl::time_grid(10.0, 201), TclOrder::Tcl4).unwrap();
        let rep = positivity_report(&trace);
        for w in rep.points.windows(2) {
            assert!(w[1].theta_ns >= w[0].theta_ns);
        }
    }

    #[test]
    fn g_positive_within_correlation_time() {
        // paper-level statement: G > 0 on (0, λ⁻¹] for all three regimes
        for (lambda, delta, tmax, n) in [
            (0.2, 2.0, 5.0, 201),
            (5.0, 50.0, 0.2, 201),
            (400.0, 10.0, 0.0025, 201),
        ] {
            let p = SpectralParams::new(1.0, lambda, delta, 100.0).unwrap();
            let trace = tcl::evaluate_trace(&p, &tcl::time_grid(tmax, n), TclOrder::Tcl4).unwrap();
            let rep = positivity_report(&trace);
            assert!(
                rep.g_positive_on(p.tau_r()),
                "G lost positivity before τ_R at λ={lambda}"
            );
        }
    }

    #[test]
    fn secular_reduction_matches_direct_inequality() {
        // with α = β = 0 the sufficient test must equal its θ = 0 form
        let p = SpectralParams::new(1.0, 0.2, 2.0, 100.0).unwrap();
        let grid = tcl::time_grid(8.0, 161);
        let trace = tcl::evaluate_trace(&p, &grid, TclOrder::Tcl4).unwrap();
        let secular: Vec<CoefficientSet> = trace
            .sets
            .iter()
            .map(|c| {
                CoefficientSet::from_totals(
                    c.t,
                    c.s_plus.total(),
                    c.s_minus.total(),
                    c.gamma_plus.total(),
                    c.gamma_minus.total(),
                    c.gamma_zero.total(),
                    0.0,
                    0.0,
                )
            })
            .collect();
        let strace = CoefficientTrace::from_sets(p, TclOrder::Tcl4, secular);
        let rep = positivity_report(&strace);
        for pt in &rep.points {
            assert_eq!(pt.theta_ns, 0.0);
            let direct =
                pt.chi <= 1.0 + pt.a * pt.a - pt.kappa * pt.kappa - 2.0 * (pt.a - pt.chi).abs();
            assert_eq!(pt.suff, direct);
        }
    }

    #[test]
    fn relaxed_holds_long_after_suff_fails() {
        // params (a) over 20τ_R = 100: the relaxed inequality survives the
        // whole window even where the stricter conditions may not
        let p = SpectralParams::new(1.0, 0.2, 2.0, 100.0).unwrap();
        let trace = tcl::evaluate_trace(&p, &tcl::time_grid(100.0, 801), TclOrder::Tcl4).unwrap();
        let rep = positivity_report(&trace);
        assert!(rep.points.iter().all(|pt| pt.relaxed));
    }

    #[test]
    fn accumulated_theta_matches_closed_form_for_constant_rates() {
        // constant Γ₋ = 0.4, Γ₊ = 0.1, Γ₀ = 0.2 on a uniform grid:
        // trapezoid is exact for constants
        let grid = tcl::time_grid(2.0, 21);
        let sets = grid
            .iter()
            .map(|&t| CoefficientSet::from_totals(t, 0.0, 0.0, 0.1, 0.4, 0.2, 0.0, 0.0))
            .collect();
        let params = SpectralParams::new(1.0, 0.2, 2.0, 100.0).unwrap();
        let trace = CoefficientTrace::from_sets(params, TclOrder::Tcl4, sets);
        let rep = positivity_report(&trace);
        let last = rep.points.last().unwrap();
        assert_relative_eq!(last.theta, 0.5 * 0.7 * 2.0, max_relative = 1e-12);
        assert_relative_eq!(last.lambda, 0.5 * 2.0, max_relative = 1e-12);
        // κ = e^{−Λ}·(Γ₊−Γ₋)/Λ'·(e^{Λ}−1) for constant rates
        let expect = (-1.0_f64).exp() * (-0.3) / 0.5 * (1.0_f64.exp() - 1.0);
        assert_relative_eq!(last.kappa, expect, max_relative = 1e-3);
    }

    #[test]
    fn csv_shape() {
        let rep = positivity_report(&zero_trace(3));
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,Theta,Lambda,chi,A,kappa,theta_ns,G,nec1,nec2,suff,relaxed"
        );
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().nth(1).unwrap().ends_with("1,1,1,1"));
    }
}
