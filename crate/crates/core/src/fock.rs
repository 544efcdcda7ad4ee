//! Symmetric bosonic basis of the two subensembles and ladder operators.
//!
//! Atoms of subensemble A (p atoms) and B (n - p atoms) are described by
//! bosonic modes `a0, a1, a2` and `b0, b1, b2`, one per atomic level; `c` is
//! the cavity photon. The sector keeps the excitation number
//! `a1 + a2 + b1 + b2 + c` equal to `p`, so a state is labelled by the five
//! occupations `(n_a1, n_a2, n_b1, n_b2, n_c)`; the ground-level occupations
//! follow from the subensemble sizes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{re, CMat, CVec, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SectorConfig {
    n: u32,
    p: u32,
}

impl SectorConfig {
    pub fn new(n: u32, p: u32) -> Result<Self> {
        if n < 2 || p < 1 || p > n {
            return Err(Error::InvalidSector { n, p });
        }
        Ok(Self { n, p })
    }

    /// Total number of atoms.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Atoms in subensemble A, which is also the excitation number.
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn size_b(&self) -> u32 {
        self.n - self.p
    }

    pub fn is_four_two(&self) -> bool {
        self.n == 4 && self.p == 2
    }
}

impl fmt::Display for SectorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, p={})", self.n, self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    A0,
    A1,
    A2,
    B0,
    B1,
    B2,
    C,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::A0,
        Mode::A1,
        Mode::A2,
        Mode::B0,
        Mode::B1,
        Mode::B2,
        Mode::C,
    ];

    fn slot(self) -> usize {
        self as usize
    }

    fn in_a(self) -> bool {
        matches!(self, Mode::A0 | Mode::A1 | Mode::A2)
    }

    fn in_b(self) -> bool {
        matches!(self, Mode::B0 | Mode::B1 | Mode::B2)
    }

    fn carries_excitation(self) -> bool {
        !matches!(self, Mode::A0 | Mode::B0)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::A0 => "a0",
            Mode::A1 => "a1",
            Mode::A2 => "a2",
            Mode::B0 => "b0",
            Mode::B1 => "b1",
            Mode::B2 => "b2",
            Mode::C => "c",
        }
    }
}

/// Full occupation of all seven modes, including the ground levels.
///
/// Used for intermediate products where the sector constraints do not hold
/// yet (e.g. building states from the vacuum).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Occupation(pub [u32; 7]);

impl Occupation {
    pub const VACUUM: Occupation = Occupation([0; 7]);

    pub fn get(&self, mode: Mode) -> u32 {
        self.0[mode.slot()]
    }

    pub fn population_a(&self) -> u32 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn population_b(&self) -> u32 {
        self.0[3] + self.0[4] + self.0[5]
    }

    pub fn excitation(&self) -> u32 {
        self.0[1] + self.0[2] + self.0[4] + self.0[5] + self.0[6]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Raise,
    Lower,
}

/// A single creation or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ladder {
    pub mode: Mode,
    pub kind: Kind,
}

impl Ladder {
    pub const fn raise(mode: Mode) -> Self {
        Self {
            mode,
            kind: Kind::Raise,
        }
    }

    pub const fn lower(mode: Mode) -> Self {
        Self {
            mode,
            kind: Kind::Lower,
        }
    }

    /// Acts on a Fock state; `None` when lowering an empty mode.
    pub fn apply(&self, occ: &Occupation) -> Option<(Occupation, f64)> {
        let mut out = *occ;
        let k = self.mode.slot();
        match self.kind {
            Kind::Raise => {
                out.0[k] += 1;
                Some((out, (out.0[k] as f64).sqrt()))
            }
            Kind::Lower => {
                if out.0[k] == 0 {
                    return None;
                }
                let amp = (out.0[k] as f64).sqrt();
                out.0[k] -= 1;
                Some((out, amp))
            }
        }
    }

    fn delta(&self) -> i64 {
        match self.kind {
            Kind::Raise => 1,
            Kind::Lower => -1,
        }
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Raise => write!(f, "{}+", self.mode.name()),
            Kind::Lower => write!(f, "{}", self.mode.name()),
        }
    }
}

/// Applies an operator word written in product order (rightmost acts first).
pub fn apply_word(word: &[Ladder], occ: &Occupation) -> Option<(Occupation, f64)> {
    word.iter().rev().try_fold((*occ, 1.0), |(o, amp), op| {
        op.apply(&o).map(|(next, a)| (next, amp * a))
    })
}

fn check_conserving(word: &[Ladder]) -> Result<()> {
    let (mut da, mut db, mut dx) = (0i64, 0i64, 0i64);
    for op in word {
        let d = op.delta();
        if op.mode.in_a() {
            da += d;
        }
        if op.mode.in_b() {
            db += d;
        }
        if op.mode.carries_excitation() {
            dx += d;
        }
    }
    if da != 0 || db != 0 || dx != 0 {
        let text: Vec<_> = word.iter().map(|op| format!("{op}")).collect();
        return Err(Error::NonConserving(format!(
            "{} changes (A, B, excitation) by ({da}, {db}, {dx})",
            text.join(" ")
        )));
    }
    Ok(())
}

/// Sector label `(n_a1, n_a2, n_b1, n_b2, n_c)`. The derived ordering is the
/// lexicographic basis ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState {
    pub n_a1: u32,
    pub n_a2: u32,
    pub n_b1: u32,
    pub n_b2: u32,
    pub n_c: u32,
}

impl BasisState {
    pub const fn new(n_a1: u32, n_a2: u32, n_b1: u32, n_b2: u32, n_c: u32) -> Self {
        Self {
            n_a1,
            n_a2,
            n_b1,
            n_b2,
            n_c,
        }
    }

    pub fn tuple(&self) -> [u32; 5] {
        [self.n_a1, self.n_a2, self.n_b1, self.n_b2, self.n_c]
    }

    pub fn excitation(&self) -> u32 {
        self.n_a1 + self.n_a2 + self.n_b1 + self.n_b2 + self.n_c
    }

    /// Excited-level occupation `n_a2 + n_b2`.
    pub fn n2(&self) -> u32 {
        self.n_a2 + self.n_b2
    }

    pub fn is_valid(&self, cfg: SectorConfig) -> bool {
        self.n_a1 + self.n_a2 <= cfg.p
            && self.n_b1 + self.n_b2 <= cfg.size_b()
            && self.excitation() == cfg.p
    }

    pub fn occupation(&self, cfg: SectorConfig) -> Occupation {
        Occupation([
            cfg.p - self.n_a1 - self.n_a2,
            self.n_a1,
            self.n_a2,
            cfg.size_b() - self.n_b1 - self.n_b2,
            self.n_b1,
            self.n_b2,
            self.n_c,
        ])
    }

    pub fn from_occupation(occ: &Occupation) -> Self {
        Self::new(occ.0[1], occ.0[2], occ.0[4], occ.0[5], occ.0[6])
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|{}{}{}{},{}>",
            self.n_a1, self.n_a2, self.n_b1, self.n_b2, self.n_c
        )
    }
}

/// Ordered basis of one `(n, p)` sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    config: SectorConfig,
    states: Vec<BasisState>,
    index: BTreeMap<BasisState, usize>,
}

impl SectorBasis {
    pub fn enumerate(config: SectorConfig) -> Self {
        let p = config.p;
        let nb = config.size_b();
        let mut states = Vec::new();
        for a1 in 0..=p {
            for a2 in 0..=(p - a1) {
                for b1 in 0..=nb.min(p - a1 - a2) {
                    for b2 in 0..=(nb - b1).min(p - a1 - a2 - b1) {
                        let c = p - a1 - a2 - b1 - b2;
                        states.push(BasisState::new(a1, a2, b1, b2, c));
                    }
                }
            }
        }
        states.sort();
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Self {
            config,
            states,
            index,
        }
    }

    pub fn config(&self) -> SectorConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> BasisState {
        self.states[i]
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &BasisState) -> bool {
        self.index.contains_key(s)
    }

    /// Unit vector on a basis state.
    pub fn ket(&self, s: &BasisState) -> Option<StateVector> {
        let i = self.index_of(s)?;
        let mut v = CVec::zeros(self.len());
        v[i] = re(1.0);
        Some(StateVector {
            config: self.config,
            amplitudes: v,
        })
    }

    /// Matrix of a sector-conserving operator word.
    pub fn operator(&self, word: &[Ladder]) -> Result<OperatorMatrix> {
        check_conserving(word)?;
        let d = self.len();
        let mut m = CMat::zeros(d, d);
        for (j, s) in self.states.iter().enumerate() {
            if let Some((out, amp)) = apply_word(word, &s.occupation(self.config)) {
                let target = BasisState::from_occupation(&out);
                let i = self
                    .index_of(&target)
                    .expect("conserving word stays in the sector");
                m[(i, j)] += re(amp);
            }
        }
        Ok(OperatorMatrix {
            config: self.config,
            matrix: m,
        })
    }

    /// Diagonal operator with entries `f(state)`.
    pub fn diagonal<F: Fn(&BasisState) -> f64>(&self, f: F) -> OperatorMatrix {
        let d = self.len();
        let mut m = CMat::zeros(d, d);
        for (i, s) in self.states.iter().enumerate() {
            m[(i, i)] = re(f(s));
        }
        OperatorMatrix {
            config: self.config,
            matrix: m,
        }
    }

    pub fn check(&self, other: SectorConfig) -> Result<()> {
        if self.config != other {
            return Err(Error::BasisMismatch {
                expected_n: self.config.n,
                expected_p: self.config.p,
                found_n: other.n,
                found_p: other.p,
            });
        }
        Ok(())
    }
}

/// Dense operator over a [`SectorBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub config: SectorConfig,
    pub matrix: CMat,
}

impl OperatorMatrix {
    pub fn adjoint(&self) -> Self {
        Self {
            config: self.config,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn element(&self, basis: &SectorBasis, bra: &BasisState, ket: &BasisState) -> Option<C64> {
        Some(self.matrix[(basis.index_of(bra)?, basis.index_of(ket)?)])
    }
}

/// Complex amplitudes over a [`SectorBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub config: SectorConfig,
    pub amplitudes: CVec,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let amps = crate::linalg::normalized(&self.amplitudes).ok_or(Error::ZeroNorm)?;
        Ok(Self {
            config: self.config,
            amplitudes: amps,
        })
    }
}

pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

/// Normalised symmetric Dicke state with `p` atoms in level 1.
///
/// In the bosonic labels the amplitude on `n_a1 = k, n_b1 = p - k` is
/// proportional to `sqrt(C(p, k) C(n - p, p - k))`.
pub fn dicke_vector(basis: &SectorBasis) -> StateVector {
    let cfg = basis.config();
    let mut v = CVec::zeros(basis.len());
    for k in 0..=cfg.p {
        let rest = cfg.p - k;
        if rest > cfg.size_b() {
            continue;
        }
        let w = (binomial(cfg.p, k) * binomial(cfg.size_b(), rest)) as f64;
        let s = BasisState::new(k, 0, rest, 0, 0);
        let i = basis
            .index_of(&s)
            .expect("Dicke component lies in the sector");
        v[i] = re(w.sqrt());
    }
    StateVector {
        config: cfg,
        amplitudes: v,
    }
    .normalized()
    .expect("Dicke state has at least one component")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(n: u32, p: u32) -> usize {
        let mut count = 0;
        for a1 in 0..=n {
            for a2 in 0..=n {
                for b1 in 0..=n {
                    for b2 in 0..=n {
                        for c in 0..=n {
                            let s = BasisState::new(a1, a2, b1, b2, c);
                            if s.is_valid(SectorConfig { n, p }) {
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn rejects_bad_sectors() {
        assert!(SectorConfig::new(4, 5).is_err());
        assert!(SectorConfig::new(4, 0).is_err());
        assert!(SectorConfig::new(1, 1).is_err());
    }

    #[test]
    fn four_two_has_fifteen_states() {
        let b = SectorBasis::enumerate(SectorConfig::new(4, 2).unwrap());
        assert_eq!(b.len(), 15);
        assert!(b.contains(&BasisState::new(2, 0, 0, 0, 0)));
        assert!(!b.contains(&BasisState::new(3, 0, 0, 0, 0)));
    }

    #[test]
    fn two_two_has_no_b_excitations() {
        let b = SectorBasis::enumerate(SectorConfig::new(2, 2).unwrap());
        assert_eq!(b.len(), 6);
        assert!(b.states().iter().all(|s| s.n_b1 == 0 && s.n_b2 == 0));
    }

    #[test]
    fn size_matches_brute_force() {
        for n in 2..=6 {
            for p in 1..=n {
                let b = SectorBasis::enumerate(SectorConfig::new(n, p).unwrap());
                assert_eq!(b.len(), brute_force_count(n, p), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn ordering_is_lexicographic_and_unique() {
        let b = SectorBasis::enumerate(SectorConfig::new(5, 3).unwrap());
        for w in b.states().windows(2) {
            assert!(w[0].tuple() < w[1].tuple());
        }
    }

    #[test]
    fn hopping_matrix_elements() {
        let b = SectorBasis::enumerate(SectorConfig::new(4, 2).unwrap());
        let hop = b
            .operator(&[Ladder::raise(Mode::A2), Ladder::lower(Mode::A1)])
            .unwrap();
        let one = hop
            .element(
                &b,
                &BasisState::new(0, 1, 1, 0, 0),
                &BasisState::new(1, 0, 1, 0, 0),
            )
            .unwrap();
        assert!((one - re(1.0)).norm() < 1e-15);
        let two = hop
            .element(
                &b,
                &BasisState::new(1, 1, 0, 0, 0),
                &BasisState::new(2, 0, 0, 0, 0),
            )
            .unwrap();
        assert!((two - re(2f64.sqrt())).norm() < 1e-15);
        let number = b
            .operator(&[Ladder::raise(Mode::A1), Ladder::lower(Mode::A1)])
            .unwrap();
        let s = BasisState::new(2, 0, 0, 0, 0);
        assert!((number.element(&b, &s, &s).unwrap() - re(2.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_conserving_words() {
        let b = SectorBasis::enumerate(SectorConfig::new(4, 2).unwrap());
        // moves an atom from A to B
        assert!(b
            .operator(&[Ladder::raise(Mode::B1), Ladder::lower(Mode::A1)])
            .is_err());
        // creates an excitation
        assert!(b
            .operator(&[Ladder::raise(Mode::A2), Ladder::lower(Mode::A0)])
            .is_err());
        // single ladder
        assert!(b.operator(&[Ladder::lower(Mode::C)]).is_err());
        assert!(b
            .operator(&[
                Ladder::raise(Mode::A2),
                Ladder::lower(Mode::A0),
                Ladder::lower(Mode::C)
            ])
            .is_ok());
    }

    #[test]
    fn dicke_amplitudes() {
        let b = SectorBasis::enumerate(SectorConfig::new(4, 2).unwrap());
        let d = dicke_vector(&b);
        let amp = |s: BasisState| d.amplitudes[b.index_of(&s).unwrap()].re;
        let s6 = 6f64.sqrt();
        assert!((amp(BasisState::new(0, 0, 2, 0, 0)) - 1.0 / s6).abs() < 1e-15);
        assert!((amp(BasisState::new(1, 0, 1, 0, 0)) - 2.0 / s6).abs() < 1e-15);
        assert!((amp(BasisState::new(2, 0, 0, 0, 0)) - 1.0 / s6).abs() < 1e-15);

        let b22 = SectorBasis::enumerate(SectorConfig::new(2, 2).unwrap());
        let d22 = dicke_vector(&b22);
        let i = b22.index_of(&BasisState::new(2, 0, 0, 0, 0)).unwrap();
        assert!((d22.amplitudes[i] - re(1.0)).norm() < 1e-15);
        assert!((d22.norm() - 1.0).abs() < 1e-15);

        // n=3, p=2: (sqrt 2, 1) on k = 1, 2
        let b32 = SectorBasis::enumerate(SectorConfig::new(3, 2).unwrap());
        let d32 = dicke_vector(&b32);
        let a1 = d32.amplitudes[b32.index_of(&BasisState::new(1, 0, 1, 0, 0)).unwrap()].re;
        let a2 = d32.amplitudes[b32.index_of(&BasisState::new(2, 0, 0, 0, 0)).unwrap()].re;
        assert!((a1 / a2 - 2f64.sqrt()).abs() < 1e-14);
    }
}
