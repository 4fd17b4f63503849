//! Glued Schwarzschild examples comparing ADM mass against the
//! Λ-invariant of the boundary.
//!
//! The exterior of a mass-`m` horizon is glued along that horizon to the
//! annulus `m'/2 <= r <= r'` of a lighter Schwarzschild metric, where the
//! sphere `r'` has the horizon's area. The result carries a Lipschitz
//! metric whose boundary is the lighter horizon.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{adm_mass, RadialConformalMetric, SchwarzschildSpec};
use crate::harness::{Direction, Hypothesis, InequalityReport, CLOSED_FORM_TOLERANCE};
use crate::numerics;
use crate::quasilocal::{lambda_invariant, RevolutionSurfaceMetric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedManifold {
    /// Mass of the outer end.
    pub m: f64,
    /// Mass of the inner annulus.
    pub m_prime: f64,
    /// Coordinate radius of the interface in the inner metric.
    pub interface_radius: f64,
    pub diagnostics: InterfaceDiagnostics,
}

/// Agreement of the two sides at the interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceDiagnostics {
    /// Interface area seen from the outer and inner sides.
    pub area: (f64, f64),
    /// Induced round radius `u^2 r` from each side.
    pub area_radius: (f64, f64),
    pub residual: f64,
}

/// Root `r > m'/2` of `(1 + m'/2r)^2 r = 2m`.
pub fn solve_interface_radius(m: f64, m_prime: f64) -> Result<f64> {
    if !(m_prime > 0.0 && m > m_prime && m.is_finite()) {
        return Err(Error::InvalidInput(format!("gluing needs m > m' > 0, got m = {m}, m' = {m_prime}")));
    }
    // u^2 r increases beyond the horizon from 2m' < 2m, so the root is unique
    let f = |r: f64| (1.0 + m_prime / (2.0 * r)).powi(2) * r - 2.0 * m;
    let lo = 0.5 * m_prime;
    let hi = 2.0 * m;
    numerics::bisect(f, lo, hi, 0.0).ok_or_else(|| Error::Unsolved("interface radius bracket".into()))
}

impl GluedManifold {
    pub fn new(m: f64, m_prime: f64) -> Result<Self> {
        let r = solve_interface_radius(m, m_prime)?;
        let outer = (1.0 + m / (2.0 * (0.5 * m))).powi(2) * 0.5 * m;
        let inner = (1.0 + m_prime / (2.0 * r)).powi(2) * r;
        let diagnostics = InterfaceDiagnostics {
            area: (4.0 * PI * outer * outer, 4.0 * PI * inner * inner),
            area_radius: (outer, inner),
            residual: (outer - inner).abs(),
        };
        Ok(Self { m, m_prime, interface_radius: r, diagnostics })
    }

    /// Exterior region `r >= m/2` of the mass-`m` metric.
    pub fn outer(&self) -> RadialConformalMetric {
        SchwarzschildSpec::new(self.m).expect("mass validated").metric()
    }

    /// The lighter metric on `r >= m'/2`; only `r <= r'` belongs to the
    /// glued manifold.
    pub fn inner(&self) -> RadialConformalMetric {
        SchwarzschildSpec::new(self.m_prime).expect("mass validated").metric()
    }
}

/// Mean curvatures across the interface, both taken with the normal
/// pointing toward the outer end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerJump {
    /// From the outer side.
    pub h_plus: f64,
    /// From the inner side.
    pub h_minus: f64,
    pub passes: bool,
}

impl CornerJump {
    fn new(h_plus: f64, h_minus: f64) -> Self {
        Self { h_plus, h_minus, passes: h_plus <= h_minus + CLOSED_FORM_TOLERANCE }
    }

    pub fn jump(&self) -> f64 {
        self.h_minus - self.h_plus
    }
}

/// The corner condition `H+ <= H-`: the outer side sees a minimal
/// horizon, the inner side a sphere outside its own horizon.
pub fn corner_jump_check(g: &GluedManifold) -> Result<CornerJump> {
    let h_plus = g.outer().mean_curvature(0.5 * g.m)?;
    let h_minus = g.inner().mean_curvature(g.interface_radius)?;
    Ok(CornerJump::new(h_plus, h_minus))
}

/// The same interface with the two sides exchanged, which violates the
/// corner condition.
pub fn corner_jump_check_mirrored(g: &GluedManifold) -> Result<CornerJump> {
    let direct = corner_jump_check(g)?;
    Ok(CornerJump::new(direct.h_minus, direct.h_plus))
}

/// ADM mass of the glued manifold against half the Λ-invariant of its
/// boundary, the round lighter horizon of area `16 pi m'^2`.
pub fn adm_vs_lambda(g: &GluedManifold) -> Result<InequalityReport> {
    let corner = corner_jump_check(g)?;
    let mass = adm_mass(&g.outer())?;
    let lambda = lambda_invariant(&RevolutionSurfaceMetric::round(2.0 * g.m_prime)?)?;
    let hyps = vec![Hypothesis { condition: "H+ <= H- across the interface".into(), holds: corner.passes }];
    Ok(InequalityReport::new(
        "adm_exceeds_half_lambda",
        hyps,
        mass,
        0.5 * lambda,
        Direction::AtLeast,
        1e-6 * mass.max(1.0),
    ))
}

/// `sqrt(|S|/16 pi) <= Lambda/2` for spheres of positive Gauss curvature,
/// strict unless round.
pub fn minkowski_gap(m: &RevolutionSurfaceMetric) -> Result<InequalityReport> {
    let lambda = lambda_invariant(m)?;
    let lhs = (m.area() / (16.0 * PI)).sqrt();
    let hyps = vec![Hypothesis { condition: "Gauss curvature > 0".into(), holds: m.min_gauss_curvature() > 0.0 }];
    let tol = 1e-8 * lhs.max(1.0);
    let mut r = InequalityReport::new("minkowski", hyps, lhs, 0.5 * lambda, Direction::AtMost, tol);
    if r.gap > tol {
        r.notes.push("strict".into());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interface_radius_closed_form() {
        let r = solve_interface_radius(2.0, 1.0).unwrap();
        assert!((r - (3.0 + 2.0 * 2f64.sqrt()) / 2.0).abs() < 1e-12);
        let r = solve_interface_radius(10.0, 0.1).unwrap();
        assert!(((1.0 + 0.05 / r).powi(2) * r - 20.0).abs() < 1e-12);
        assert!(solve_interface_radius(1.0, 1.0).is_err());
        assert!(solve_interface_radius(1.0, 2.0).is_err());
    }

    #[test]
    fn interface_is_isometric() {
        for (m, mp) in [(2.0, 1.0), (10.0, 0.1), (1.0, 0.999)] {
            let g = GluedManifold::new(m, mp).unwrap();
            let (a, b) = g.diagnostics.area;
            assert!((a - b).abs() < 1e-10 * a);
            assert!(g.diagnostics.residual < 1e-10 * m);
        }
    }

    #[test]
    fn corner_condition() {
        let g = GluedManifold::new(2.0, 1.0).unwrap();
        let c = corner_jump_check(&g).unwrap();
        let r = g.interface_radius;
        let expect = 2.0 * (1.0 + 0.5 / r).powi(-3) * (1.0 - 0.5 / r) / r;
        assert!(c.h_plus.abs() < 1e-12);
        assert!((c.h_minus - expect).abs() < 1e-12);
        assert!(c.passes);
        let mirror = corner_jump_check_mirrored(&g).unwrap();
        assert!(!mirror.passes);
        // u^2 r is stationary at the horizon, so the jump closes like sqrt(m - m')
        let jumps: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|d| corner_jump_check(&GluedManifold::new(1.0, 1.0 - d).unwrap()).unwrap().jump())
            .collect();
        assert!(jumps[0] > 5.0 * jumps[1] && jumps[1] > 5.0 * jumps[2] && jumps[2] < 1e-2, "{jumps:?}");
    }

    #[test]
    fn adm_against_lambda() {
        for (m, mp) in [(2.0, 1.0), (10.0, 0.1), (1.0, 0.999)] {
            let rep = adm_vs_lambda(&GluedManifold::new(m, mp).unwrap()).unwrap();
            assert!((rep.lhs - m).abs() < 1e-8, "{rep:?}");
            assert!((rep.rhs - mp).abs() < 1e-8, "{rep:?}");
            assert!(rep.satisfied && rep.gap > 0.0);
        }
    }

    /// `int (k1 + k2) dA` for a prolate spheroid with equatorial radius `a`
    /// and polar radius `c > a`.
    fn prolate_total_mean_curvature(a: f64, c: f64) -> f64 {
        let f = (c * c - a * a).sqrt();
        2.0 * PI * (2.0 * c + a * a / f * ((c + f) / (c - f)).ln())
    }

    #[test]
    fn minkowski_examples() {
        let round = minkowski_gap(&RevolutionSurfaceMetric::round(2.0).unwrap()).unwrap();
        assert!((round.lhs - 1.0).abs() < 1e-10 && (round.rhs - 1.0).abs() < 1e-8 && round.equality_within);
        let mut ratios = Vec::new();
        for c in [2.0, 5.0] {
            let rep = minkowski_gap(&RevolutionSurfaceMetric::spheroid(1.0, c).unwrap()).unwrap();
            let oracle = prolate_total_mean_curvature(1.0, c) / (16.0 * PI);
            assert!((rep.rhs - oracle).abs() < 1e-6 * oracle, "{} vs {oracle}", rep.rhs);
            assert!(rep.notes.iter().any(|n| n == "strict"));
            ratios.push(rep.rhs / rep.lhs);
        }
        assert!(ratios[1] > ratios[0]);
    }

    #[test]
    fn json_round_trip() {
        let g = GluedManifold::new(2.0, 1.0).unwrap();
        let back: GluedManifold = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
