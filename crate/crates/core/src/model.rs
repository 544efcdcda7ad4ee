//! Cavity and drive Hamiltonians and the symmetry operators of the sector.
//!
//! `H_g = g (a2+ a0 + b2+ b0) c + h.c.` couples the ground level 0 to the
//! excited level 2 through the cavity photon, and
//! `H_Omega = Omega_a a2+ a1 + Omega_b b2+ b1 + h.c.` drives 1 <-> 2 with
//! subensemble-dependent complex Rabi amplitudes. Energies are in units of
//! the Rabi scale `Omega` (1 by default).

use crate::error::{Error, Result};
use crate::fock::{Ladder, Mode, OperatorMatrix, SectorBasis, SectorConfig};
use crate::linalg::{CMat, C64};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    pub omega: f64,
    pub theta: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl ControlParams {
    pub fn new(theta: f64, phi_a: f64, phi_b: f64) -> Self {
        Self {
            omega: 1.0,
            theta,
            phi_a,
            phi_b,
        }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    /// `Omega sin(theta) e^{i phi_a}`
    pub fn omega_a(&self) -> C64 {
        C64::from_polar(self.omega * self.theta.sin(), self.phi_a)
    }

    /// `Omega cos(theta) e^{i phi_b}`
    pub fn omega_b(&self) -> C64 {
        C64::from_polar(self.omega * self.theta.cos(), self.phi_b)
    }
}

impl Default for ControlParams {
    fn default() -> Self {
        Self::new(core::f64::consts::FRAC_PI_4, 0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub sector: SectorConfig,
    pub g: f64,
}

impl ModelConfig {
    pub fn new(sector: SectorConfig, g: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidCoupling(g));
        }
        Ok(Self { sector, g })
    }
}

const HOP_A: [Ladder; 2] = [Ladder::raise(Mode::A2), Ladder::lower(Mode::A1)];
const HOP_B: [Ladder; 2] = [Ladder::raise(Mode::B2), Ladder::lower(Mode::B1)];
const CAV_A: [Ladder; 3] = [
    Ladder::raise(Mode::A2),
    Ladder::lower(Mode::A0),
    Ladder::lower(Mode::C),
];
const CAV_B: [Ladder; 3] = [
    Ladder::raise(Mode::B2),
    Ladder::lower(Mode::B0),
    Ladder::lower(Mode::C),
];

/// Precomputed operator pieces for fast Hamiltonian assembly.
#[derive(Debug, Clone)]
pub struct Model {
    config: ModelConfig,
    basis: SectorBasis,
    hop_a: CMat,
    hop_b: CMat,
    h_g: CMat,
}

impl Model {
    pub fn new(config: ModelConfig) -> Self {
        let basis = SectorBasis::enumerate(config.sector);
        let op = |w: &[Ladder]| basis.operator(w).expect("conserving word").matrix;
        let hop_a = op(&HOP_A);
        let hop_b = op(&HOP_B);
        let lower = op(&CAV_A) + op(&CAV_B);
        let h_g = (&lower + lower.adjoint()) * C64::new(config.g, 0.0);
        Self {
            config,
            basis,
            hop_a,
            hop_b,
            h_g,
        }
    }

    pub fn config(&self) -> ModelConfig {
        self.config
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `a2+ a1` (rows: final state).
    pub fn hop_a(&self) -> &CMat {
        &self.hop_a
    }

    pub fn hop_b(&self) -> &CMat {
        &self.hop_b
    }

    pub fn h_g(&self) -> &CMat {
        &self.h_g
    }

    pub fn h_omega(&self, params: &ControlParams) -> CMat {
        let raise = &self.hop_a * params.omega_a() + &self.hop_b * params.omega_b();
        &raise + raise.adjoint()
    }

    pub fn hamiltonian(&self, params: &ControlParams) -> CMat {
        self.h_omega(params) + &self.h_g
    }

    pub fn number(&self) -> CMat {
        build_n(&self.basis).matrix
    }

    pub fn parity(&self) -> CMat {
        build_parity(&self.basis).matrix
    }
}

pub fn build_hg(config: &ModelConfig, basis: &SectorBasis) -> Result<OperatorMatrix> {
    basis.check(config.sector)?;
    let op = |w: &[Ladder]| basis.operator(w).map(|m| m.matrix);
    let lower = op(&CAV_A)? + op(&CAV_B)?;
    Ok(OperatorMatrix {
        config: config.sector,
        matrix: (&lower + lower.adjoint()) * C64::new(config.g, 0.0),
    })
}

pub fn build_homega(
    config: &ModelConfig,
    params: &ControlParams,
    basis: &SectorBasis,
) -> Result<OperatorMatrix> {
    basis.check(config.sector)?;
    let raise = basis.operator(&HOP_A)?.matrix * params.omega_a()
        + basis.operator(&HOP_B)?.matrix * params.omega_b();
    Ok(OperatorMatrix {
        config: config.sector,
        matrix: &raise + raise.adjoint(),
    })
}

/// Total excitation number.
pub fn build_n(basis: &SectorBasis) -> OperatorMatrix {
    basis.diagonal(|s| s.excitation() as f64)
}

/// Excited-level occupation `n_a2 + n_b2`.
pub fn build_n2(basis: &SectorBasis) -> OperatorMatrix {
    basis.diagonal(|s| s.n2() as f64)
}

/// `exp(i pi N2)`.
pub fn build_parity(basis: &SectorBasis) -> OperatorMatrix {
    basis.diagonal(|s| if s.n2() % 2 == 0 { 1.0 } else { -1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::BasisState;
    use crate::linalg::{anticommutator, commutator, hermiticity_deviation, re};

    fn four_two() -> (ModelConfig, SectorBasis) {
        let cfg = ModelConfig::new(SectorConfig::new(4, 2).unwrap(), 3.0).unwrap();
        (cfg, SectorBasis::enumerate(cfg.sector))
    }

    #[test]
    fn rejects_bad_coupling() {
        let s = SectorConfig::new(4, 2).unwrap();
        assert!(ModelConfig::new(s, 0.0).is_err());
        assert!(ModelConfig::new(s, f64::NAN).is_err());
    }

    #[test]
    fn cavity_term_is_hermitian_hopping() {
        let (cfg, b) = four_two();
        let hg = build_hg(&cfg, &b).unwrap().matrix;
        assert_eq!(hermiticity_deviation(&hg), 0.0);
        for i in 0..b.len() {
            assert_eq!(hg[(i, i)], re(0.0));
        }
        // two photons: only one quantum moved into a2 or b2
        let j = b.index_of(&BasisState::new(0, 0, 0, 0, 2)).unwrap();
        for i in 0..b.len() {
            if hg[(i, j)].norm() > 0.0 {
                let s = b.state(i);
                assert_eq!(s.n_c, 1);
                assert_eq!(s.n2(), 1);
            }
        }
    }

    #[test]
    fn drive_term() {
        let (cfg, b) = four_two();
        let zero_theta = ControlParams::new(0.0, 0.4, 1.3);
        assert!(zero_theta.omega_a().norm() < 1e-300);
        let h = build_homega(&cfg, &zero_theta, &b).unwrap().matrix;
        // no a-transition survives
        let i = b.index_of(&BasisState::new(1, 1, 0, 0, 0)).unwrap();
        let j = b.index_of(&BasisState::new(2, 0, 0, 0, 0)).unwrap();
        assert_eq!(h[(i, j)], re(0.0));

        let params = ControlParams::new(0.6, 0.9, -2.1);
        let h = build_homega(&cfg, &params, &b).unwrap().matrix;
        assert!(hermiticity_deviation(&h) < 1e-15);
        let expect = params.omega_a() * 2f64.sqrt();
        assert!((h[(i, j)] - expect).norm() < 1e-14);
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let (cfg, _) = four_two();
        let other = SectorBasis::enumerate(SectorConfig::new(5, 2).unwrap());
        assert!(matches!(
            build_hg(&cfg, &other),
            Err(Error::BasisMismatch { .. })
        ));
    }

    #[test]
    fn symmetry_operators() {
        let (cfg, b) = four_two();
        let n = build_n(&b).matrix;
        for i in 0..b.len() {
            assert_eq!(n[(i, i)], re(2.0));
        }
        let pi2 = build_parity(&b).matrix;
        assert_eq!(&pi2 * &pi2, CMat::identity(b.len(), b.len()));
        let s = BasisState::new(0, 1, 0, 1, 0);
        let k = b.index_of(&s).unwrap();
        assert_eq!(build_n2(&b).matrix[(k, k)], re(2.0));
        assert_eq!(pi2[(k, k)], re(1.0));

        let model = Model::new(cfg);
        let h = model.hamiltonian(&ControlParams::new(0.3, 1.0, 2.0));
        assert!(commutator(&n, &h).norm() < 1e-13);
        assert!(anticommutator(&pi2, &h).norm() < 1e-13);
    }

    #[test]
    fn drive_magnitudes_are_phase_independent() {
        let (cfg, b) = four_two();
        let h1 = build_homega(&cfg, &ControlParams::new(0.7, 0.0, 0.0), &b)
            .unwrap()
            .matrix;
        let h2 = build_homega(&cfg, &ControlParams::new(0.7, 2.2, -0.4), &b)
            .unwrap()
            .matrix;
        let d = h1.map(|z| z.norm()) - h2.map(|z| z.norm());
        assert!(d.norm() < 1e-14);
    }
}
