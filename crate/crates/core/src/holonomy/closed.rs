//! Closed-form holonomies for the n=4, p=2 sector.
//!
//! The printed rotation formulas use Pauli matrices in the basis ordered
//! (D2, D1). Results here are expressed in the (D1, D2) order used by the
//! dark frames, i.e. conjugated by `sigma_x`: a theta ramp becomes
//! `exp(+i dc_y sigma_y)` and a phase loop `exp(i c_x sigma_x - i c_z sigma_z)`.

use core::f64::consts::{FRAC_PI_4, PI};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::SectorConfig;
use crate::linalg::{su2_exp, Mat2};

/// Rotation coefficients of one segment, as printed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCoeffs {
    pub c_x: f64,
    pub c_y: f64,
    pub c_z: f64,
}

impl ClosedFormCoeffs {
    /// Unitary in the (D1, D2) basis.
    pub fn unitary(&self) -> Mat2 {
        // printed exp(i c_x sx - i c_y sy + i c_z sz), conjugated by sx
        su2_exp(self.c_x, self.c_y, -self.c_z)
    }
}

pub fn require_four_two(sector: SectorConfig) -> Result<()> {
    if sector.is_four_two() {
        Ok(())
    } else {
        Err(Error::ClosedFormUnavailable {
            n: sector.n(),
            p: sector.p(),
        })
    }
}

/// `c_y(theta) = -arctan sqrt((19 - 5 cos 4theta) / 6)`, principal branch.
pub fn c_y(theta: f64) -> f64 {
    -((19.0 - 5.0 * (4.0 * theta).cos()) / 6.0).sqrt().atan()
}

/// Coefficients of `C_theta(theta_1, theta_0)`: only `c_y(theta_1) - c_y(theta_0)`.
pub fn theta_coeffs(theta_1: f64, theta_0: f64) -> ClosedFormCoeffs {
    ClosedFormCoeffs {
        c_x: 0.0,
        c_y: c_y(theta_1) - c_y(theta_0),
        c_z: 0.0,
    }
}

/// Coefficients of `C_phi(m_a, m_b; theta)`.
pub fn phi_coeffs(m_a: i64, m_b: i64, theta: f64) -> ClosedFormCoeffs {
    let (sum, diff) = ((m_a + m_b) as f64, (m_a - m_b) as f64);
    let c4 = (4.0 * theta).cos();
    // sin 4theta vanishes at multiples of pi/4; avoid rounding residue there
    let c_x = if (4.0 * theta).sin().abs() < 1e-12 {
        0.0
    } else {
        2.0 * 6f64.sqrt() * diff * PI * (2.0 * theta).sin() * (4.0 * theta).sin()
            / ((5.0 - c4) * (19.0 - 5.0 * c4).sqrt())
    };
    let den = (5.0 - c4) * (5.0 * c4 - 19.0);
    let c_z = sum * PI * ((8.0 * theta).cos() - 20.0 * c4 + 51.0) / den
        - diff * PI * (16.0 * (6.0 * theta).cos() - 96.0 * (2.0 * theta).cos()) / den;
    ClosedFormCoeffs { c_x, c_y: 0.0, c_z }
}

pub fn theta_unitary(theta_1: f64, theta_0: f64) -> Mat2 {
    theta_coeffs(theta_1, theta_0).unitary()
}

pub fn phi_unitary(m_a: i64, m_b: i64, theta: f64) -> Mat2 {
    phi_coeffs(m_a, m_b, theta).unitary()
}

/// `W = U(C_theta(pi/4, t1)) U(C_phi(m_a, m_b; t1)) U(C_theta(t1, pi/4))`.
pub fn w_unitary(m_a: i64, m_b: i64, theta_1: f64) -> Mat2 {
    theta_unitary(FRAC_PI_4, theta_1)
        * phi_unitary(m_a, m_b, theta_1)
        * theta_unitary(theta_1, FRAC_PI_4)
}

/// `W'`: as `W` but the first ramp starts from theta = 0.
pub fn w_prime_unitary(m_a: i64, m_b: i64, theta_1: f64) -> Mat2 {
    theta_unitary(FRAC_PI_4, theta_1) * phi_unitary(m_a, m_b, theta_1) * theta_unitary(theta_1, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{projective_distance2, sigma_z};

    #[test]
    fn c_y_at_quarter_pi() {
        assert!((c_y(FRAC_PI_4) - (-(2f64.atan()))).abs() < 1e-15);
        assert!((c_y(FRAC_PI_4) + 1.1071487).abs() < 1e-7);
    }

    #[test]
    fn quarter_pi_loop_is_pauli_z() {
        let k = phi_coeffs(1, 0, FRAC_PI_4);
        assert_eq!(k.c_x, 0.0);
        assert!((k.c_z + PI / 2.0).abs() < 1e-14);
        assert!(projective_distance2(&phi_unitary(1, 0, FRAC_PI_4), &sigma_z()) < 1e-14);
        assert!(projective_distance2(&w_unitary(1, 0, FRAC_PI_4), &sigma_z()) < 1e-14);
    }

    #[test]
    fn trivial_cases() {
        let id = Mat2::identity();
        assert!((theta_unitary(0.4, 0.4) - id).norm() < 1e-15);
        assert!((phi_unitary(0, 0, 0.3) - id).norm() < 1e-15);
        assert!((w_unitary(0, 0, 0.7) - id).norm() < 1e-14);
    }

    #[test]
    fn ramps_compose_additively() {
        let a = theta_unitary(1.2, 0.5) * theta_unitary(0.5, 0.1);
        assert!((a - theta_unitary(1.2, 0.1)).norm() < 1e-14);
    }

    #[test]
    fn rejects_other_sectors() {
        assert!(require_four_two(SectorConfig::new(4, 2).unwrap()).is_ok());
        let e = require_four_two(SectorConfig::new(5, 2).unwrap()).unwrap_err();
        assert_eq!(e, Error::ClosedFormUnavailable { n: 5, p: 2 });
    }
}
