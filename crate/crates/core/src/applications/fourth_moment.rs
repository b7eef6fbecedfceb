//! Fourth moments of homogeneous chaos `F = J_q(f)` and the carré du champ.

use num_complex::Complex64;
use serde::Serialize;

use crate::antisym::{binomial, factorial, AntiTensor};
use crate::chaos::CliffordElement;
use crate::error::{Error, Result};
use crate::malliavin::{carre_norm, derivative, inv_number, process_pairing};
use crate::oracle::MatrixOracle;

const CLASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adjointness {
    SelfAdjoint,
    AntiSelfAdjoint,
}

/// Classifies `J_q(f)` by `conj(←f) = ±f`; anything else is rejected.
pub fn adjointness(f: &AntiTensor) -> Result<Adjointness> {
    let star = f.reverse().conj();
    let tol = CLASS_TOL * (1.0 + f.norm_sqr().sqrt());
    if star.max_abs_diff(f)? <= tol {
        Ok(Adjointness::SelfAdjoint)
    } else if star.add(f)?.iter().all(|(_, c)| c.norm() <= tol) {
        Ok(Adjointness::AntiSelfAdjoint)
    } else {
        Err(Error::InvalidInput(format!(
            "J_{}(f) is neither self-adjoint nor anti-self-adjoint",
            f.degree()
        )))
    }
}

/// `Δ Σ_k ‖f(k,·) ∧̂_r f‖²` in plain norms.
pub fn wedge_integral(f: &AntiTensor, r: usize) -> Result<f64> {
    let grid = f.grid();
    let mut sum = 0.0;
    for k in 1..=grid.slots() {
        let slice = f.slice_first(k)?;
        if slice.nnz() == 0 {
            continue;
        }
        sum += slice.contract_hat(f, r)?.plain_l2_norm().powi(2);
    }
    Ok(grid.width() * sum)
}

/// `‖f ∧̂_r f‖` in the plain norm.
pub fn hat_norm(f: &AntiTensor, r: usize) -> Result<f64> {
    Ok(f.contract_hat(f, r)?.plain_l2_norm())
}

fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Both sides of `‖f ∧̂_r f‖² = ((1 + (-1)^{q+r})/2)·Δ Σ_k ‖f(k,·) ∧̂_r f‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AntiNormCheck {
    pub q: usize,
    pub r: usize,
    pub lhs: f64,
    pub integral: f64,
    pub rhs: f64,
    /// Right side with the extra `1/(q-r)²` factor.
    pub rhs_typeset: f64,
}

pub fn antisymmetric_norm_check(f: &AntiTensor, r: usize) -> Result<AntiNormCheck> {
    let q = f.degree();
    if r >= q {
        return Err(Error::ContractionOrder { r, p: q.saturating_sub(1), q });
    }
    let lhs = hat_norm(f, r)?.powi(2);
    let integral = wedge_integral(f, r)?;
    let rhs = (1.0 + parity(q + r)) / 2.0 * integral;
    let gap = (q - r) as f64;
    Ok(AntiNormCheck { q, r, lhs, integral, rhs, rhs_typeset: rhs / (gap * gap) })
}

/// Fourth-moment decomposition of `F = J_q(f)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourthMomentReport {
    pub q: usize,
    pub adjointness: Adjointness,
    /// `m(F²)`.
    pub m2: f64,
    /// `m(F⁴)` from the chaos product.
    pub m4: f64,
    /// `2·m(F²)²`.
    pub c0: f64,
    /// `(2·m(F²))²`.
    pub c0_typeset: f64,
    /// `((-1)^q/2)·(2q)!·Δ Σ_k ‖f(k,·) ∧ f‖²`.
    pub w0: f64,
    /// `T_r` for `r = 1..q-1`.
    pub t: Vec<f64>,
    /// `T_r` with `r(1+(-1)^{q+r})/(q-r)²` inside the braces.
    pub t_typeset: Vec<f64>,
    /// `K(F) = Σ_r T_r`.
    pub k: f64,
    /// `Δ Σ_k ‖f(k,·) ∧̂_r f‖²` for `r = 0..q-1`.
    pub integrals: Vec<f64>,
    /// `‖f ∧̂_r f‖` for `r = 0..=q`.
    pub hat_norms: Vec<f64>,
    /// `⟨Ω, M⁴Ω⟩` from the matrix oracle, absent above the dimension cap.
    pub oracle_m4: Option<f64>,
}

impl FourthMomentReport {
    pub fn formula_m4(&self) -> f64 {
        self.c0 + self.w0 + self.k
    }

    pub fn formula_m4_typeset_c0(&self) -> f64 {
        self.c0_typeset + self.w0 + self.k
    }

    pub fn formula_m4_typeset_t(&self) -> f64 {
        self.c0 + self.w0 + self.t_typeset.iter().sum::<f64>()
    }

    /// Largest `‖f ∧̂_r f‖` over `0 ≤ r ≤ q` with `q + r` odd.
    pub fn max_odd_parity_norm(&self) -> f64 {
        self.hat_norms
            .iter()
            .enumerate()
            .filter(|(r, _)| (self.q + r) % 2 == 1)
            .fold(0.0, |m, (_, v)| m.max(*v))
    }
}

/// Requires `J_q(f)` self-adjoint or anti-self-adjoint, `q ≥ 1`.
pub fn fourth_moment(f: &AntiTensor) -> Result<FourthMomentReport> {
    let q = f.degree();
    if q == 0 {
        return Err(Error::InvalidInput("fourth moment needs degree q ≥ 1".into()));
    }
    let adjointness = adjointness(f)?;
    let grid = f.grid();
    let x = CliffordElement::from_tensor(f.clone());
    let x2 = x.multiply(&x)?;
    let m2 = x2.state().re;
    let m4 = x2.multiply(&x2)?.state().re;

    let integrals = (0..q).map(|r| wedge_integral(f, r)).collect::<Result<Vec<_>>>()?;
    let hat_norms = (0..=q).map(|r| hat_norm(f, r)).collect::<Result<Vec<_>>>()?;
    let w0 = parity(q) / 2.0 * factorial(2 * q) * integrals[0];
    let qf = q as f64;
    let mut t = Vec::with_capacity(q.saturating_sub(1));
    let mut t_typeset = Vec::with_capacity(q.saturating_sub(1));
    for r in 1..q {
        let rf = r as f64;
        let gap = (q - r) as f64;
        let sign = parity(q + r);
        let front = factorial(r).powi(2) * factorial(2 * q - 2 * r) * binomial(q, r).powi(4) / qf;
        let tail = sign / 2.0 * gap;
        t.push(front * (rf * (1.0 + sign) + tail) * integrals[r]);
        t_typeset.push(front * (rf * (1.0 + sign) / (gap * gap) + tail) * integrals[r]);
    }
    let k = t.iter().sum();

    let oracle_m4 = match MatrixOracle::new(grid) {
        Ok(oracle) => {
            let m = oracle.to_matrix(&x)?;
            let mut v = m.apply_vacuum();
            for _ in 0..3 {
                v = m.matrix() * v;
            }
            Some(v[0].re)
        }
        Err(Error::DimensionCap { .. }) => None,
        Err(e) => return Err(e),
    };

    Ok(FourthMomentReport {
        q,
        adjointness,
        m2,
        m4,
        c0: 2.0 * m2 * m2,
        c0_typeset: 4.0 * m2 * m2,
        w0,
        t,
        t_typeset,
        k,
        integrals,
        hat_norms,
        oracle_m4,
    })
}

/// Closed-form and direct `Var(‖𝒟.F‖²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceCarre {
    pub closed: f64,
    pub direct: f64,
}

/// `Σ_{r<q, q+r even} r²(r!)²C(q,r)⁴(2q-2r)!‖f ∧̂_r f‖²` against
/// `m(G*G) - |m(G)|²` for `G = ‖𝒟.F‖²`.
pub fn variance_carre(f: &AntiTensor) -> Result<VarianceCarre> {
    adjointness(f)?;
    let q = f.degree();
    let mut closed = 0.0;
    for r in (1..q).filter(|r| (q + r) % 2 == 0) {
        let rf = r as f64;
        closed += rf * rf * factorial(r).powi(2) * binomial(q, r).powi(4) * factorial(2 * q - 2 * r)
            * hat_norm(f, r)?.powi(2);
    }
    let g = carre_norm(&CliffordElement::from_tensor(f.clone()));
    let direct = g.norm_sqr() - g.state().norm_sqr();
    Ok(VarianceCarre { closed, direct })
}

/// The three equivalent quantities for `F = J_q(f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim1Report {
    pub q: usize,
    /// `⟨𝒟F, 𝒟R⁻¹F⟩`.
    pub pairing: CliffordElement,
    /// Largest coefficient gap between the pairing and `(1/q)‖𝒟.F‖²`.
    pub pairing_residual: f64,
    /// `‖⟨𝒟F, 𝒟R⁻¹F⟩ - ‖F‖²‖_{L²(𝒞)}`.
    pub distance_to_constant: f64,
    pub variance: VarianceCarre,
    /// `(r, ‖f ∧̂_r f‖)` for `1 ≤ r < q` with `q + r` even.
    pub wedge_norms: Vec<(usize, f64)>,
}

pub fn claim1_report(f: &AntiTensor) -> Result<Claim1Report> {
    let q = f.degree();
    if q == 0 {
        return Err(Error::InvalidInput("claim1 needs degree q ≥ 1".into()));
    }
    let variance = variance_carre(f)?;
    let x = CliffordElement::from_tensor(f.clone());
    let pairing = process_pairing(&derivative(&x), &derivative(&inv_number(&x)?))?;
    let carre = carre_norm(&x).scale_real(1.0 / q as f64);
    let pairing_residual = pairing.max_abs_diff(&carre)?;
    let constant = CliffordElement::scalar(x.grid(), Complex64::new(x.norm_sqr(), 0.0));
    let distance_to_constant = pairing.distance(&constant)?;
    let wedge_norms = (1..q)
        .filter(|r| (q + r) % 2 == 0)
        .map(|r| hat_norm(f, r).map(|n| (r, n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Claim1Report { q, pairing, pairing_residual, distance_to_constant, variance, wedge_norms })
}

/// Witness that `K(F) ≠ 0` while `‖f ∧̂_2 f‖ = 0`, for `f = f_1∧f_2∧f_3∧f_4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim2Report {
    pub k: f64,
    pub wedge2_norm: f64,
    pub wedge3_integral: f64,
    /// `(3!)²·4/(4!)⁴·Π‖f_i‖⁴`.
    pub wedge3_expected: f64,
    pub fourth_moment: FourthMomentReport,
}

pub fn claim2_witness(fs: &[AntiTensor; 4]) -> Result<Claim2Report> {
    let grid = fs[0].grid();
    if grid.slots() < 4 {
        return Err(Error::InvalidInput(format!("claim2 needs d ≥ 4, got {}", grid.slots())));
    }
    for (i, fi) in fs.iter().enumerate() {
        grid.ensure_same(&fi.grid())?;
        if fi.degree() != 1 {
            return Err(Error::DegreeMismatch { left: fi.degree(), right: 1 });
        }
        if fi.is_zero() {
            return Err(Error::InvalidInput(format!("f_{} is zero", i + 1)));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let ip = fs[i].inner(&fs[j])?.norm();
            if ip > CLASS_TOL * fs[i].plain_l2_norm() * fs[j].plain_l2_norm() {
                return Err(Error::InvalidInput(format!(
                    "f_{} and f_{} are not orthogonal (|⟨f_i, f_j⟩| = {ip:e})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let f = fs[0].wedge(&fs[1])?.wedge(&fs[2])?.wedge(&fs[3])?;
    let fourth_moment = fourth_moment(&f)?;
    let norms: f64 = fs.iter().map(|fi| fi.plain_l2_norm().powi(4)).product();
    Ok(Claim2Report {
        k: fourth_moment.k,
        wedge2_norm: fourth_moment.hat_norms[2],
        wedge3_integral: fourth_moment.integrals[3],
        wedge3_expected: factorial(3).powi(2) * 4.0 / factorial(4).powi(4) * norms,
        fourth_moment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use crate::random::{random_self_adjoint_tensor, rng_for};

    fn e(g: TimeGrid, slots: &[usize]) -> AntiTensor {
        AntiTensor::basis(g, slots).unwrap()
    }

    #[test]
    fn classification() {
        let g = TimeGrid::unit(4).unwrap();
        assert_eq!(adjointness(&e(g, &[1])).unwrap(), Adjointness::SelfAdjoint);
        assert_eq!(adjointness(&e(g, &[1, 2])).unwrap(), Adjointness::AntiSelfAdjoint);
        let i12 = e(g, &[1, 2]).scale(Complex64::i());
        assert_eq!(adjointness(&i12).unwrap(), Adjointness::SelfAdjoint);
        let mixed = e(g, &[1, 2]).add(&i12).unwrap();
        assert!(adjointness(&mixed).is_err());
    }

    #[test]
    fn e12_decomposition() {
        let g = TimeGrid::unit(2).unwrap();
        let rep = fourth_moment(&e(g, &[1, 2])).unwrap();
        assert!((rep.m4 - 1.0).abs() < 1e-14);
        assert!((rep.c0 - 2.0).abs() < 1e-14);
        assert!(rep.w0.abs() < 1e-14);
        assert_eq!(rep.t.len(), 1);
        assert!((rep.t[0] + 1.0).abs() < 1e-14);
        assert!((rep.oracle_m4.unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn e1234_decomposition() {
        let g = TimeGrid::unit(4).unwrap();
        let rep = fourth_moment(&e(g, &[1, 2, 3, 4])).unwrap();
        assert!((rep.m4 - 1.0).abs() < 1e-12);
        assert!((rep.k + 1.0).abs() < 1e-12);
        assert!(rep.t[0].abs() < 1e-14 && rep.t[1].abs() < 1e-14);
        assert!((rep.integrals[3] - 1.0 / 2304.0).abs() < 1e-15);
    }

    #[test]
    fn field_has_no_correction() {
        let g = TimeGrid::new(3, 0.5).unwrap();
        let z = g.indicator_vector(g.full()).unwrap();
        let rep = fourth_moment(&z).unwrap();
        assert_eq!(rep.k, 0.0);
        assert!((rep.formula_m4() - rep.m4).abs() < 1e-12);
    }

    #[test]
    fn antisymmetric_norm_on_random_tensors() {
        let mut rng = rng_for(47, 0);
        for q in 2..=4 {
            let g = TimeGrid::new(6, 0.5).unwrap();
            let f = random_self_adjoint_tensor(&mut rng, g, q);
            for r in 0..q {
                let c = antisymmetric_norm_check(&f, r).unwrap();
                assert!((c.lhs - c.rhs).abs() < 1e-10 * (1.0 + c.lhs), "q={q} r={r} {c:?}");
            }
        }
    }

    #[test]
    fn variance_examples() {
        let g = TimeGrid::unit(3).unwrap();
        let v = variance_carre(&e(g, &[1, 2])).unwrap();
        assert_eq!(v.closed, 0.0);
        assert!(v.direct.abs() < 1e-14);
        let v = variance_carre(&e(g, &[1, 2, 3])).unwrap();
        assert!((v.closed - v.direct).abs() < 1e-12);
    }

    #[test]
    fn claim2_rejects_overlap() {
        let g = TimeGrid::unit(4).unwrap();
        let fs = [e(g, &[1]), e(g, &[1]), e(g, &[3]), e(g, &[4])];
        assert!(claim2_witness(&fs).is_err());
    }
}
