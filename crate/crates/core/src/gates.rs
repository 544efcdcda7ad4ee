//! SU(2) utilities and gate synthesis from dark-space holonomies.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI, TAU};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::holonomy::{phi_unitary, w_unitary};
use crate::linalg::{
    c, from_mat2, projective_distance2, sigma_x, su2_exp, unitarity_deviation, Mat2, C64,
};

/// Unitaries further than this from unitary are rejected.
pub const UNITARITY_TOL: f64 = 1e-8;

/// `U = exp(i global_phase) exp(-i angle/2 axis.sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    pub axis: [f64; 3],
    pub angle: f64,
    pub global_phase: f64,
}

impl AxisAngle {
    pub fn to_unitary(&self) -> Mat2 {
        let h = -self.angle / 2.0;
        let [x, y, z] = self.axis;
        su2_exp(h * x, h * y, h * z) * C64::from_polar(1.0, self.global_phase)
    }
}

/// Coordinates `(a0, a)` of an SU(2) matrix `a0 I - i a.sigma`, read off
/// without assuming exact unit determinant.
pub fn su2_coordinates(v: &Mat2) -> (f64, [f64; 3]) {
    let a0 = (v[(0, 0)] + v[(1, 1)]).re / 2.0;
    let ax = -(v[(0, 1)] + v[(1, 0)]).im / 2.0;
    let ay = (v[(1, 0)] - v[(0, 1)]).re / 2.0;
    let az = (v[(1, 1)] - v[(0, 0)]).im / 2.0;
    (a0, [ax, ay, az])
}

/// Rotations this close to a half-turn (in `|cos(angle/2)|`) are treated as
/// half-turns when choosing the axis sign.
pub const HALF_TURN_TOL: f64 = 1e-8;

/// Canonical decomposition with `angle` in `[0, pi]`, or at most
/// `2 HALF_TURN_TOL` beyond pi for near half-turns so that numerically
/// computed half-turns keep a positive axis; the angle-0 case reports axis z.
pub fn axis_angle(u: &Mat2) -> Result<AxisAngle> {
    let dev = unitarity_deviation(&from_mat2(u));
    if dev.is_nan() || dev > UNITARITY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let mut gamma = u.determinant().arg() / 2.0;
    let (mut a0, mut a) = su2_coordinates(&(u * C64::from_polar(1.0, -gamma)));
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if norm < 1e-15 {
        if a0 < 0.0 {
            gamma += PI;
        }
        return Ok(AxisAngle {
            axis: [0.0, 0.0, 1.0],
            angle: 0.0,
            global_phase: wrap(gamma),
        });
    }
    // -V is the same gate; prefer the branch with a0 >= 0 and, for
    // half-turns, a positive leading axis component (z, then x, then y)
    let leading = [a[2], a[0], a[1]]
        .into_iter()
        .find(|x| x.abs() > 1e-12)
        .unwrap_or(0.0);
    let flip = if a0.abs() <= HALF_TURN_TOL {
        leading < 0.0
    } else {
        a0 < 0.0
    };
    if flip {
        a0 = -a0;
        a = [-a[0], -a[1], -a[2]];
        gamma += PI;
    }
    let angle = 2.0 * norm.atan2(a0);
    let axis = [a[0] / norm, a[1] / norm, a[2] / norm];
    Ok(AxisAngle {
        axis,
        angle,
        global_phase: wrap(gamma),
    })
}

/// `x` reduced to `[0, 2 pi)`.
fn wrap(x: f64) -> f64 {
    let r = x % TAU;
    if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub const NORTH: BlochPoint = BlochPoint {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Bloch vector of `alpha |D1> + beta |D2>` with `D1` at the north pole.
    pub fn from_amplitudes(alpha: C64, beta: C64) -> Self {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        let ab = alpha.conj() * beta;
        BlochPoint {
            x: 2.0 * ab.re / n,
            y: 2.0 * ab.im / n,
            z: (alpha.norm_sqr() - beta.norm_sqr()) / n,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// One random word applied to `|D1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSample {
    pub point: BlochPoint,
    pub seq_len: usize,
}

/// Default generators `U(C_phi(1,0;pi/6))` and `U(C_phi(0,-1;pi/6))`.
pub fn default_generators() -> (Mat2, Mat2) {
    (phi_unitary(1, 0, FRAC_PI_6), phi_unitary(0, -1, FRAC_PI_6))
}

/// Word `index` of a sampling run: length uniform in `[1, max_len]`, letters
/// i.i.d. uniform over the two generators. Each word has its own stream, so
/// words can be produced in any order.
pub fn sample_word(u1: &Mat2, u2: &Mat2, max_len: usize, seed: u64, index: u64) -> BlochSample {
    if max_len == 0 {
        return BlochSample {
            point: BlochPoint::NORTH,
            seq_len: 0,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let len = rng.random_range(1..=max_len);
    let (mut alpha, mut beta) = (c(1.0, 0.0), c(0.0, 0.0));
    for _ in 0..len {
        let u = if rng.random::<bool>() { u1 } else { u2 };
        (alpha, beta) = (
            u[(0, 0)] * alpha + u[(0, 1)] * beta,
            u[(1, 0)] * alpha + u[(1, 1)] * beta,
        );
    }
    BlochSample {
        point: BlochPoint::from_amplitudes(alpha, beta),
        seq_len: len,
    }
}

pub fn universality_sample(
    u1: &Mat2,
    u2: &Mat2,
    max_len: usize,
    count: usize,
    seed: u64,
) -> Vec<BlochSample> {
    (0..count as u64)
        .map(|i| sample_word(u1, u2, max_len, seed, i))
        .collect()
}

/// Zonal equal-area partition of the sphere: two polar caps and collars
/// split into equal longitude sectors, all cells of area `4 pi / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualAreaPartition {
    /// `cos(colatitude)` at the top of each zone, cap first, descending.
    zone_tops: Vec<f64>,
    /// Cells per zone, including the two caps.
    zone_cells: Vec<usize>,
}

impl EqualAreaPartition {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "partition needs at least one cell");
        if n == 1 {
            return Self {
                zone_tops: alloc::vec![1.0],
                zone_cells: alloc::vec![1],
            };
        }
        if n == 2 {
            return Self {
                zone_tops: alloc::vec![1.0, 0.0],
                zone_cells: alloc::vec![1, 1],
            };
        }
        let nf = n as f64;
        let cap = 2.0 * (1.0 / nf).sqrt().asin();
        let ideal_width = (4.0 * PI / nf).sqrt();
        let collars = (((PI - 2.0 * cap) / ideal_width).round() as usize).max(1);
        let width = (PI - 2.0 * cap) / collars as f64;
        let region_area = 4.0 * PI / nf;
        let mut zone_cells = alloc::vec![1];
        let mut carry = 0.0;
        for i in 0..collars {
            let top = cap + i as f64 * width;
            let ideal = TAU * (top.cos() - (top + width).cos()) / region_area;
            let m = (ideal + carry).round();
            carry += ideal - m;
            zone_cells.push(m as usize);
        }
        zone_cells.push(1);
        // zone boundaries chosen so every zone holds exactly its cells' area
        let mut zone_tops = Vec::with_capacity(zone_cells.len());
        let mut above = 0usize;
        for &m in &zone_cells {
            zone_tops.push(1.0 - 2.0 * above as f64 / nf);
            above += m;
        }
        debug_assert_eq!(above, n);
        Self {
            zone_tops,
            zone_cells,
        }
    }

    pub fn len(&self) -> usize {
        self.zone_cells.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn zones(&self) -> &[usize] {
        &self.zone_cells
    }

    /// Cell index of a point, counted from the north cap.
    pub fn cell_of(&self, p: &BlochPoint) -> usize {
        let r = p.norm();
        let z = if r > 0.0 {
            (p.z / r).clamp(-1.0, 1.0)
        } else {
            1.0
        };
        let zone = self
            .zone_tops
            .iter()
            .rposition(|&top| z <= top)
            .unwrap_or(0);
        let m = self.zone_cells[zone];
        let lon = wrap(p.y.atan2(p.x));
        let k = ((lon / TAU * m as f64) as usize).min(m - 1);
        self.zone_cells[..zone].iter().sum::<usize>() + k
    }

    /// Fraction of cells holding at least one point.
    pub fn fill_fraction<'a>(&self, points: impl IntoIterator<Item = &'a BlochPoint>) -> f64 {
        let mut hit = alloc::vec![false; self.len()];
        for p in points {
            hit[self.cell_of(p)] = true;
        }
        hit.iter().filter(|&&h| h).count() as f64 / self.len() as f64
    }
}

/// z-component of the (unnormalised) rotation vector of `W(m_a, m_b; theta)`.
pub fn w_axis_z(m_a: i64, m_b: i64, theta: f64) -> f64 {
    su2_coordinates(&w_unitary(m_a, m_b, theta)).1[2]
}

pub const THETA_SCAN_POINTS: usize = 512;

/// Smallest `theta_1` in (0, pi/2) where the rotation axis of
/// `W(m_a, m_b; theta_1)` lies along x, by scan plus bisection.
pub fn find_theta_star(m_a: i64, m_b: i64, tol: f64) -> Result<f64> {
    let (lo, hi) = (1e-6, FRAC_PI_2 - 1e-6);
    let f = |t: f64| w_axis_z(m_a, m_b, t);
    let rotation = |t: f64| {
        let a = su2_coordinates(&w_unitary(m_a, m_b, t)).1;
        (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
    };
    let h = (hi - lo) / THETA_SCAN_POINTS as f64;
    let mut prev = (lo, f(lo));
    for i in 1..=THETA_SCAN_POINTS {
        let t = lo + h * i as f64;
        let cur = (t, f(t));
        if prev.1 == 0.0 || prev.1.signum() != cur.1.signum() {
            let root = bisect(&f, prev, cur, tol);
            // crossings through the identity have no defined axis
            if rotation(root) > 1e-6 {
                return Ok(root);
            }
        }
        prev = cur;
    }
    Err(Error::NoBracket { lo, hi })
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: (f64, f64), mut b: (f64, f64), tol: f64) -> f64 {
    if a.1 == 0.0 {
        return a.0;
    }
    for _ in 0..200 {
        let m = 0.5 * (a.0 + b.0);
        let fm = f(m);
        if fm == 0.0 || fm.abs() <= tol * 1e-2 && (b.0 - a.0) <= tol {
            return m;
        }
        if fm.signum() == a.1.signum() {
            a = (m, fm);
        } else {
            b = (m, fm);
        }
        if b.0 - a.0 <= f64::EPSILON * m.abs() {
            break;
        }
    }
    if a.1.abs() <= b.1.abs() {
        a.0
    } else {
        b.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XApproximation {
    pub k_best: usize,
    pub distance: f64,
    /// Projective distance of `W^k` to X for k = 1..=max_reps.
    pub distances: Vec<f64>,
}

/// Best power of a gate as an approximation of Pauli X.
pub fn approximate_x_with(w: &Mat2, max_reps: usize) -> XApproximation {
    let x = sigma_x();
    let mut power = Mat2::identity();
    let mut distances = Vec::with_capacity(max_reps);
    for _ in 0..max_reps {
        power = w * power;
        distances.push(projective_distance2(&power, &x));
    }
    let (k, d) = distances
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &d)| {
            if d < best.1 {
                (i + 1, d)
            } else {
                best
            }
        });
    XApproximation {
        k_best: k,
        distance: d,
        distances,
    }
}

pub fn approximate_x(theta_star: f64, m_a: i64, m_b: i64, max_reps: usize) -> XApproximation {
    approximate_x_with(&w_unitary(m_a, m_b, theta_star), max_reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_unitary, sigma_z, to_mat2};
    use core::f64::consts::FRAC_PI_4;

    #[test]
    fn pauli_z_and_identity() {
        let z = axis_angle(&sigma_z()).unwrap();
        assert_eq!(z.axis, [0.0, 0.0, 1.0]);
        assert!((z.angle - PI).abs() < 1e-15);
        let id = axis_angle(&Mat2::identity()).unwrap();
        assert_eq!(id.angle, 0.0);
        assert_eq!(id.axis, [0.0, 0.0, 1.0]);
        let minus = axis_angle(&-Mat2::identity()).unwrap();
        assert_eq!(minus.angle, 0.0);
        assert!((minus.global_phase - PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_unitary() {
        assert!(matches!(
            axis_angle(&(Mat2::identity() * c(2.0, 0.0))),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn reconstruction_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let u = to_mat2(&random_unitary(&mut rng, 2));
            let aa = axis_angle(&u).unwrap();
            assert!((aa.to_unitary() - u).norm() < 1e-10);
            assert!((0.0..TAU).contains(&aa.angle));
        }
    }

    #[test]
    fn w_axis_in_xz_plane() {
        let aa = axis_angle(&w_unitary(0, 1, FRAC_PI_6)).unwrap();
        assert!(aa.axis[1].abs() <= 1e-10);
    }

    #[test]
    fn bloch_mapping() {
        let p = BlochPoint::from_amplitudes(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(p, BlochPoint::NORTH);
        let s = 0.5f64.sqrt();
        let p = BlochPoint::from_amplitudes(c(s, 0.0), c(0.0, s));
        assert!((p.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_samples_stay_at_north_pole() {
        let id = Mat2::identity();
        for s in universality_sample(&id, &id, 30, 50, 3) {
            assert!((s.point.z - 1.0).abs() < 1e-15);
        }
        assert_eq!(sample_word(&id, &id, 0, 1, 0).point, BlochPoint::NORTH);
    }

    #[test]
    fn sampling_is_reproducible() {
        let (u1, u2) = default_generators();
        assert_eq!(
            universality_sample(&u1, &u2, 30, 100, 7),
            universality_sample(&u1, &u2, 30, 100, 7)
        );
        assert_ne!(
            universality_sample(&u1, &u2, 30, 100, 7),
            universality_sample(&u1, &u2, 30, 100, 8)
        );
    }

    #[test]
    fn partition_cells() {
        for n in [1, 2, 3, 10, 200, 777] {
            let part = EqualAreaPartition::new(n);
            assert_eq!(part.len(), n);
        }
        let part = EqualAreaPartition::new(200);
        assert_eq!(part.cell_of(&BlochPoint::NORTH), 0);
        assert_eq!(
            part.cell_of(&BlochPoint {
                x: 0.0,
                y: 0.0,
                z: -1.0
            }),
            199
        );
    }

    #[test]
    fn partition_is_equal_area() {
        // uniform points on the sphere land evenly in all cells
        let part = EqualAreaPartition::new(200);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts = alloc::vec![0usize; 200];
        let total = 400_000;
        for _ in 0..total {
            let z: f64 = rng.random_range(-1.0..1.0);
            let phi: f64 = rng.random_range(0.0..TAU);
            let r = (1.0 - z * z).sqrt();
            counts[part.cell_of(&BlochPoint {
                x: r * phi.cos(),
                y: r * phi.sin(),
                z,
            })] += 1;
        }
        let expect = total as f64 / 200.0;
        for &k in &counts {
            assert!((k as f64 - expect).abs() < 6.0 * expect.sqrt(), "{k}");
        }
    }

    #[test]
    fn theta_star_for_zero_one() {
        let t = find_theta_star(0, 1, 1e-12).unwrap();
        assert!(t > 0.0 && t < FRAC_PI_2);
        let aa = axis_angle(&w_unitary(0, 1, t)).unwrap();
        assert!(
            aa.axis[1].abs() <= 1e-8 && aa.axis[2].abs() <= 1e-8,
            "{aa:?}"
        );
        assert!(w_axis_z(0, 1, t).abs() <= 1e-10);
        let coarse = find_theta_star(0, 1, 1e-10).unwrap();
        assert!((coarse - t).abs() <= 1e-8);
        assert!((t - FRAC_PI_4).abs() > 1e-3);
    }

    #[test]
    fn no_bracket_for_zero_winding() {
        assert!(matches!(
            find_theta_star(0, 0, 1e-12),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn near_half_turns_keep_a_positive_axis() {
        for eps in [1e-10, -1e-10, 0.0] {
            let u = AxisAngle {
                axis: [0.0, 0.0, -1.0],
                angle: PI - eps,
                global_phase: 0.3,
            }
            .to_unitary();
            let aa = axis_angle(&u).unwrap();
            assert!(aa.axis[2] > 0.999_999, "{aa:?}");
            assert!((aa.to_unitary() - u).norm() < 1e-12);
        }
    }

    #[test]
    fn exact_half_turn_is_one_step() {
        let r = approximate_x_with(&sigma_x(), 10);
        assert_eq!(r.k_best, 1);
        assert!(r.distance < 1e-15);
    }

    #[test]
    fn x_from_repeated_w() {
        let t = find_theta_star(0, 1, 1e-12).unwrap();
        let r = approximate_x(t, 0, 1, 200);
        assert!(r.distance <= 0.05, "{r:?}");
        assert!(r.distances.iter().all(|&d| d <= 2.0 + 1e-12));
    }

    #[test]
    fn default_generators_fill_the_sphere() {
        let (u1, u2) = default_generators();
        let samples = universality_sample(&u1, &u2, 30, 10_000, 7);
        let fill = EqualAreaPartition::new(200).fill_fraction(samples.iter().map(|s| &s.point));
        assert!(fill >= 0.99, "{fill}");
        assert!(samples.iter().all(|s| (s.point.norm() - 1.0).abs() < 1e-10));
    }
}
