//! Functions of a single field `Ψ(z)`, the log-Sobolev check and the
//! characteristic-function distance.

use num_complex::Complex64;
use serde::Serialize;

use crate::antisym::AntiTensor;
use crate::chaos::CliffordElement;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::malliavin::{derivative, inv_number, process_pairing};
use crate::oracle::MatrixOracle;

fn check_real_field(z: &AntiTensor) -> Result<f64> {
    if z.degree() != 1 {
        return Err(Error::DegreeMismatch { left: z.degree(), right: 1 });
    }
    if z.iter().any(|(_, c)| c.im != 0.0) {
        return Err(Error::InvalidInput("field direction z must be real".into()));
    }
    let norm = z.plain_l2_norm();
    if norm == 0.0 {
        return Err(Error::InvalidInput("field direction z must be nonzero".into()));
    }
    Ok(norm)
}

/// `φ(Ψ(z)) = (φ(‖z‖) + φ(-‖z‖))/2 + Ψ(z)·(φ(‖z‖) - φ(-‖z‖))/(2‖z‖)`
/// from the two branch values `(φ(+‖z‖), φ(-‖z‖))`.
pub fn two_point(values: (Complex64, Complex64), z: &AntiTensor) -> Result<CliffordElement> {
    let norm = check_real_field(z)?;
    let (plus, minus) = values;
    let constant = CliffordElement::scalar(z.grid(), (plus + minus) * 0.5);
    let linear = CliffordElement::field(z)?.scale((plus - minus) / (2.0 * norm));
    Ok(&constant + &linear)
}

pub fn two_point_fn(phi: impl Fn(f64) -> Complex64, z: &AntiTensor) -> Result<CliffordElement> {
    let norm = check_real_field(z)?;
    two_point((phi(norm), phi(-norm)), z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogSobolevReport {
    pub a: f64,
    pub b: f64,
    /// `∫_0^1 (a/2) log((b + a u)/(b - a u)) du`.
    pub entropy: f64,
    /// Quadrature error estimate for `entropy`.
    pub entropy_error: f64,
    /// `‖𝒟.φ(Ψ_1)‖²`.
    pub energy: f64,
    /// `2·log 4·energy`.
    pub bound: f64,
    /// `2·energy`.
    pub sharp_bound: f64,
}

/// `½(x log x + y log y) - b log b` with `x = φ(1)²`, `y = φ(-1)²`.
pub fn entropy_closed_form(phi1: f64, phim1: f64) -> f64 {
    let xlogx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let (x, y) = (phi1 * phi1, phim1 * phim1);
    0.5 * (xlogx(x) + xlogx(y)) - xlogx(0.5 * (x + y))
}

/// Entropy against Malliavin energy for `φ(Ψ_1)`, `Ψ_1 = Ψ(1_{[0,1]})`, on a
/// grid of `slots` cells of width `1/slots`.
pub fn log_sobolev_check(phi1: f64, phim1: f64, slots: usize) -> Result<LogSobolevReport> {
    if !(phi1.is_finite() && phim1.is_finite()) {
        return Err(Error::InvalidInput("φ values must be finite".into()));
    }
    let grid = TimeGrid::new(slots, 1.0 / slots as f64)?;
    let a = (phi1 * phi1 - phim1 * phim1) / 2.0;
    let b = (phi1 * phi1 + phim1 * phim1) / 2.0;

    // with u = √t the integrand is (a/2)·log((b+au)/(b-au)) on [0, 1]; the
    // reflection v = 1 - u puts any log singularity (b = |a|) at v = 0
    let alpha = a.abs();
    let (entropy, entropy_error) = if alpha == 0.0 {
        (0.0, 0.0)
    } else {
        let gap = b - alpha;
        let out = quadrature::double_exponential::integrate(
            |v| {
                let num = b + alpha - alpha * v;
                let den = gap + alpha * v;
                if den <= 0.0 {
                    0.0
                } else {
                    0.5 * alpha * (num.ln() - den.ln())
                }
            },
            0.0,
            1.0,
            1e-14,
        );
        (out.integral, out.error_estimate)
    };

    let z = grid.indicator_vector(grid.full())?;
    let f = two_point((Complex64::new(phi1, 0.0), Complex64::new(phim1, 0.0)), &z)?;
    let energy = derivative(&f).norm_sqr();
    Ok(LogSobolevReport {
        a,
        b,
        entropy,
        entropy_error,
        energy,
        bound: 2.0 * 4f64.ln() * energy,
        sharp_bound: 2.0 * energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicDistance {
    pub t: f64,
    /// `‖e^{itF} - e^{itΨ(z)}‖_{L²(𝒞)}`.
    pub lhs: f64,
    /// `|t|·‖F - Ψ(z)‖`.
    pub middle: f64,
    /// `|t|·|1 - m(⟨𝒟F, 𝒟R⁻¹F⟩)|`.
    pub right: f64,
}

/// Requires `F` self-adjoint and centred, `z` real with `‖z‖ = 1`.
pub fn characteristic_distance(
    f: &CliffordElement,
    z: &AntiTensor,
    t: f64,
    oracle: &MatrixOracle,
) -> Result<CharacteristicDistance> {
    let norm = check_real_field(z)?;
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("z must be a unit vector, ‖z‖ = {norm}")));
    }
    if !f.is_self_adjoint(1e-12) {
        return Err(Error::NotSelfAdjoint(f.distance(&f.adjoint())?));
    }
    let psi = CliffordElement::field(z)?;
    let phase = |x: f64| Complex64::new(0.0, t * x).exp();
    let ef = oracle.to_matrix(f)?.functional_calculus(phase)?;
    let ez = oracle.to_matrix(&psi)?.functional_calculus(phase)?;
    let lhs = ef.sub(&ez)?.vacuum_norm();
    let middle = t.abs() * f.distance(&psi)?;
    let rinv = inv_number(f)?;
    let pairing = process_pairing(&derivative(f), &derivative(&rinv))?.state();
    let right = t.abs() * (Complex64::new(1.0, 0.0) - pairing).norm();
    Ok(CharacteristicDistance { t, lhs, middle, right })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::malliavin::derivative_at;
    use crate::random::{random_unit_vector, rng_for};

    fn energy_by_slots(f: &CliffordElement) -> f64 {
        let grid = f.grid();
        let sum: f64 = (1..=grid.slots()).map(|k| derivative_at(f, k).unwrap().norm_sqr()).sum();
        sum * grid.width()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn two_point_examples() {
        let g = TimeGrid::new(4, 0.5).unwrap();
        let a = crate::slots::SlotSet::prefix(3);
        let z = g.indicator_vector(a).unwrap();
        let sq = two_point_fn(|x| c(x * x), &z).unwrap();
        assert!(sq.max_abs_diff(&CliffordElement::scalar(g, c(1.5))).unwrap() < 1e-14);
        let id = two_point_fn(c, &z).unwrap();
        assert!(id.max_abs_diff(&CliffordElement::field(&z).unwrap()).unwrap() < 1e-14);

        let mut rng = rng_for(53, 0);
        let u = random_unit_vector(&mut rng, g);
        let step = two_point_fn(|x| c(if x >= 0.0 { 1.0 } else { 0.0 }), &u).unwrap();
        let want = (&CliffordElement::one(g) + &CliffordElement::field(&u).unwrap()).scale_real(0.5);
        assert!(step.max_abs_diff(&want).unwrap() < 1e-14);
        assert!(two_point_fn(c, &AntiTensor::zero(g, 1)).is_err());
    }

    #[test]
    fn log_sobolev_examples() {
        let r = log_sobolev_check(1.0, 0.0, 2).unwrap();
        assert!((r.entropy - 2f64.ln() / 2.0).abs() < 1e-12);
        assert!((r.bound - 4f64.ln() / 2.0).abs() < 1e-14);
        assert!((r.sharp_bound - 0.5).abs() < 1e-14);
        let flat = log_sobolev_check(0.7, 0.7, 3).unwrap();
        assert_eq!(flat.entropy, 0.0);
        assert!(flat.bound.abs() < 1e-15);
        let zero = log_sobolev_check(0.0, 0.0, 1).unwrap();
        assert_eq!((zero.entropy, zero.bound), (0.0, 0.0));
    }

    #[test]
    fn entropy_matches_closed_form() {
        for (p, m) in [(1.0, 0.5), (-0.3, 2.0), (0.0, 1.0), (1.5, -1.5)] {
            let r = log_sobolev_check(p, m, 1).unwrap();
            assert!((r.entropy - entropy_closed_form(p, m)).abs() < 1e-12, "{p} {m}");
        }
    }

    #[test]
    fn energy_is_squared_half_jump() {
        let r = log_sobolev_check(2.0, -1.0, 4).unwrap();
        assert!((r.energy - 2.25).abs() < 1e-14);
        let g = TimeGrid::new(4, 0.25).unwrap();
        let z = g.indicator_vector(g.full()).unwrap();
        let f = two_point((c(2.0), c(-1.0)), &z).unwrap();
        assert!((energy_by_slots(&f) - r.energy).abs() < 1e-14);
    }

    #[test]
    fn characteristic_examples() {
        let g = TimeGrid::unit(3).unwrap();
        let o = MatrixOracle::new(g).unwrap();
        let z = AntiTensor::basis(g, &[3]).unwrap();
        let psi = CliffordElement::field(&z).unwrap();
        let zero_t = characteristic_distance(&psi, &z, 0.0, &o).unwrap();
        assert_eq!((zero_t.lhs, zero_t.middle, zero_t.right), (0.0, 0.0, 0.0));
        let same = characteristic_distance(&psi, &z, 1.3, &o).unwrap();
        assert!(same.lhs < 1e-14 && same.middle == 0.0);
        let f = CliffordElement::from_tensor(AntiTensor::basis(g, &[1, 2]).unwrap().scale(Complex64::i()));
        let r = characteristic_distance(&f, &z, 1.0, &o).unwrap();
        assert!(r.lhs <= r.middle);
        assert!(characteristic_distance(&CliffordElement::one(g), &z, 1.0, &o).is_err());
    }
}
