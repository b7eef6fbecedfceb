//! Finite chaos expansions `F = Σ_n J_n(f_n)` and the Clifford product.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::antisym::{binomial, factorial, AntiTensor};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::par::Execution;
use crate::slots::SlotSet;

/// An element of the finite Clifford algebra, stored as one tensor per chaos
/// level `0..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement {
    grid: TimeGrid,
    levels: Vec<AntiTensor>,
}

impl CliffordElement {
    pub fn zero(grid: TimeGrid) -> Self {
        let levels = (0..=grid.slots()).map(|n| AntiTensor::zero(grid, n)).collect();
        CliffordElement { grid, levels }
    }

    pub fn scalar(grid: TimeGrid, c: Complex64) -> Self {
        let mut out = Self::zero(grid);
        out.levels[0] = AntiTensor::scalar(grid, c);
        out
    }

    pub fn one(grid: TimeGrid) -> Self {
        Self::scalar(grid, Complex64::new(1.0, 0.0))
    }

    /// `J_n(f)`. Degrees above `d` carry no coefficients and give zero.
    pub fn from_tensor(f: AntiTensor) -> Self {
        let mut out = Self::zero(f.grid());
        if f.degree() <= f.grid().slots() {
            let n = f.degree();
            out.levels[n] = f;
        }
        out
    }

    /// `Σ J_{n_i}(f_i)`; tensors of equal degree are summed.
    pub fn from_tensors<I: IntoIterator<Item = AntiTensor>>(grid: TimeGrid, tensors: I) -> Result<Self> {
        let mut out = Self::zero(grid);
        for f in tensors {
            grid.ensure_same(&f.grid())?;
            if f.degree() <= grid.slots() {
                out.levels[f.degree()].add_scaled(&f, Complex64::new(1.0, 0.0));
            }
        }
        Ok(out)
    }

    /// `Ψ(z) = J_1(z)`.
    pub fn field(z: &AntiTensor) -> Result<Self> {
        if z.degree() != 1 {
            return Err(Error::DegreeMismatch { left: z.degree(), right: 1 });
        }
        Ok(Self::from_tensor(z.clone()))
    }

    /// `Ψ(e_k)`.
    pub fn field_basis(grid: TimeGrid, k: usize) -> Result<Self> {
        Ok(Self::from_tensor(AntiTensor::basis(grid, &[k])?))
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn level(&self, n: usize) -> &AntiTensor {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[AntiTensor] {
        &self.levels
    }

    /// Highest level with a stored coefficient, or `None` for zero.
    pub fn max_degree(&self) -> Option<usize> {
        self.levels.iter().rposition(|f| f.nnz() > 0)
    }

    pub fn coeff(&self, s: SlotSet) -> Complex64 {
        self.levels.get(s.len()).map_or(Complex64::new(0.0, 0.0), |f| f.coeff(s))
    }

    /// All stored `(S, c_S)` pairs, by level then mask.
    pub fn terms(&self) -> impl Iterator<Item = (SlotSet, Complex64)> + '_ {
        self.levels.iter().flat_map(|f| f.iter())
    }

    pub fn map_levels(&self, f: impl Fn(&AntiTensor) -> AntiTensor) -> Self {
        CliffordElement { grid: self.grid, levels: self.levels.iter().map(f).collect() }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        self.map_levels(|f| f.scale(k))
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(Complex64::new(k, 0.0))
    }

    pub(crate) fn add_scaled(&mut self, other: &CliffordElement, k: Complex64) {
        debug_assert_eq!(self.grid, other.grid);
        for (mine, theirs) in self.levels.iter_mut().zip(&other.levels) {
            mine.add_scaled(theirs, k);
        }
    }

    pub fn try_add(&self, other: &CliffordElement) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = self.clone();
        out.add_scaled(other, Complex64::new(1.0, 0.0));
        Ok(out)
    }

    pub fn try_sub(&self, other: &CliffordElement) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = self.clone();
        out.add_scaled(other, Complex64::new(-1.0, 0.0));
        Ok(out)
    }

    /// `F·G` via `J_p(f)J_q(g) = Σ_r r!·C(p,r)·C(q,r)·J_{p+q-2r}(f ∧̂_r g)`.
    pub fn multiply(&self, other: &CliffordElement) -> Result<Self> {
        self.multiply_with(other, Execution::default())
    }

    pub fn multiply_with(&self, other: &CliffordElement, exec: Execution) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let pairs: Vec<(usize, usize)> = (0..self.levels.len())
            .filter(|&p| self.levels[p].nnz() > 0)
            .flat_map(|p| {
                (0..other.levels.len()).filter(|&q| other.levels[q].nnz() > 0).map(move |q| (p, q))
            })
            .collect();
        let parts = exec.map_slice(&pairs, |&(p, q)| {
            self.levels[p].contract_hat_all(&other.levels[q]).expect("grids checked above")
        });
        let mut out = Self::zero(self.grid);
        for (&(p, q), contractions) in pairs.iter().zip(&parts) {
            for (r, h) in contractions.iter().enumerate() {
                if h.degree() > self.grid.slots() {
                    continue;
                }
                let w = factorial(r) * binomial(p, r) * binomial(q, r);
                out.levels[h.degree()].add_scaled(h, Complex64::new(w, 0.0));
            }
        }
        Ok(out)
    }

    /// `F*`: `f_n ↦ conj(←f_n)`.
    pub fn adjoint(&self) -> Self {
        self.map_levels(|f| f.reverse().conj())
    }

    /// Grading automorphism `β`: `f_n ↦ (-1)^n f_n`.
    pub fn beta(&self) -> Self {
        self.map_levels(|f| if f.degree() % 2 == 0 { f.clone() } else { f.scale(Complex64::new(-1.0, 0.0)) })
    }

    /// Vacuum state `m(F) = f_0`.
    pub fn state(&self) -> Complex64 {
        self.levels[0].coeff(SlotSet::EMPTY)
    }

    /// `m(F*G) = Σ_n ⟨f_n, g_n⟩_{Λ_n}`.
    pub fn l2_inner(&self, other: &CliffordElement) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.levels.iter().zip(&other.levels).map(|(f, g)| f.inner(g).expect("same grid")).sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.levels.iter().fold(0.0, |acc, f| acc + f.norm_sqr())
    }

    /// `‖F‖_{L²(𝒞)}`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `‖F - G‖_{L²(𝒞)}`.
    pub fn distance(&self, other: &CliffordElement) -> Result<f64> {
        Ok(self.try_sub(other)?.norm())
    }

    /// Largest coefficient modulus of `F - G`.
    pub fn max_abs_diff(&self, other: &CliffordElement) -> Result<f64> {
        let diff = self.try_sub(other)?;
        Ok(diff.terms().fold(0.0, |m, (_, c)| m.max(c.norm())))
    }

    /// `m(F | 𝒞_A)`: keep coefficients supported in `A`.
    pub fn cond_expect(&self, a: SlotSet) -> Self {
        self.map_levels(|f| f.restrict(a))
    }

    /// Union of the supports of all coefficients of positive degree.
    pub fn support(&self) -> SlotSet {
        self.levels.iter().fold(SlotSet::EMPTY, |acc, f| acc.union(f.support()))
    }

    /// `‖F - F*‖ ≤ tol·(1 + ‖F‖)`.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.distance(&self.adjoint()).expect("same grid") <= tol * (1.0 + self.norm())
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;

    /// # Panics
    /// On a grid mismatch; use [`CliffordElement::try_add`] to handle it.
    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_add(rhs).expect("grid mismatch")
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;

    fn sub(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_sub(rhs).expect("grid mismatch")
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;

    fn mul(self, rhs: &CliffordElement) -> CliffordElement {
        self.multiply(rhs).expect("grid mismatch")
    }
}

impl Mul<Complex64> for &CliffordElement {
    type Output = CliffordElement;

    fn mul(self, rhs: Complex64) -> CliffordElement {
        self.scale(rhs)
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;

    fn neg(self) -> CliffordElement {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_element, random_real_tensor, random_subset, rng_for};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn psi(g: TimeGrid, k: usize) -> CliffordElement {
        CliffordElement::field_basis(g, k).unwrap()
    }

    fn j(g: TimeGrid, slots: &[usize]) -> CliffordElement {
        CliffordElement::from_tensor(AntiTensor::basis(g, slots).unwrap())
    }

    fn set(v: &[usize]) -> SlotSet {
        SlotSet::from_slots(v.iter().copied()).unwrap()
    }

    fn close(a: &CliffordElement, b: &CliffordElement, tol: f64) -> bool {
        a.max_abs_diff(b).unwrap() <= tol
    }

    #[test]
    fn product_examples() {
        let g = TimeGrid::unit(3).unwrap();
        let one = CliffordElement::one(g);
        assert!(close(&(&psi(g, 1) * &psi(g, 1)), &one, 1e-15));
        assert!(close(&(&psi(g, 1) * &psi(g, 2)), &j(g, &[1, 2]), 1e-15));
        let f = j(g, &[1, 2]);
        assert!(close(&(&f * &f), &-&one, 1e-15));
    }

    #[test]
    fn product_at_other_width() {
        let g = TimeGrid::new(3, 0.25).unwrap();
        // Ψ(1_{[0,T]})² = T
        let z = g.indicator_vector(g.full()).unwrap();
        let f = CliffordElement::field(&z).unwrap();
        assert!(close(&(&f * &f), &CliffordElement::scalar(g, c(0.75)), 1e-14));
    }

    #[test]
    fn adjoint_and_beta() {
        let g = TimeGrid::unit(3).unwrap();
        assert_eq!(psi(g, 1).adjoint(), psi(g, 1));
        assert_eq!(j(g, &[1, 2]).adjoint(), -&j(g, &[1, 2]));
        assert_eq!(psi(g, 1).beta(), -&psi(g, 1));
        assert_eq!(CliffordElement::one(g).beta(), CliffordElement::one(g));
        let mut rng = rng_for(3, 0);
        let x = random_element(&mut rng, g, 3);
        assert_eq!(x.adjoint().adjoint(), x);
        assert_eq!(x.beta().beta(), x);
    }

    #[test]
    fn state_and_inner() {
        let g = TimeGrid::unit(3).unwrap();
        assert_eq!(CliffordElement::one(g).state(), c(1.0));
        assert_eq!(j(g, &[1, 2]).state(), c(0.0));
        assert_eq!(j(g, &[1, 2]).l2_inner(&j(g, &[1, 2])).unwrap(), c(1.0));
        assert_eq!(psi(g, 1).l2_inner(&j(g, &[1, 2])).unwrap(), c(0.0));
        let mut rng = rng_for(5, 0);
        for _ in 0..20 {
            let x = random_element(&mut rng, g, 3);
            let y = random_element(&mut rng, g, 3);
            let via_product = (&x.adjoint() * &y).state();
            assert!((via_product - x.l2_inner(&y).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn cond_expect_examples() {
        let g = TimeGrid::unit(3).unwrap();
        assert_eq!(j(g, &[1, 2]).cond_expect(set(&[1])), CliffordElement::zero(g));
        let z = &psi(g, 1) + &psi(g, 2);
        assert_eq!(z.cond_expect(set(&[1])), psi(g, 1));
        let mut rng = rng_for(9, 0);
        let x = random_element(&mut rng, g, 3);
        assert_eq!(x.cond_expect(g.full()), x);
    }

    #[test]
    fn conditional_expectation_module_property() {
        let g = TimeGrid::new(5, 0.5).unwrap();
        let mut rng = rng_for(13, 0);
        for _ in 0..20 {
            let a = random_subset(&mut rng, g);
            let x = random_element(&mut rng, g, 3);
            let v = random_element(&mut rng, g, 3).cond_expect(a);
            let lhs = (&x.cond_expect(a) * &v).state();
            let rhs = (&x * &v).state();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn isometry_of_chaos_map() {
        let g = TimeGrid::new(4, 0.5).unwrap();
        let mut rng = rng_for(17, 0);
        for n in 0..=4 {
            let f = random_real_tensor(&mut rng, g, n);
            let x = CliffordElement::from_tensor(f.clone());
            let m = (&x.adjoint() * &x).state();
            assert!((m.re - f.norm_sqr()).abs() < 1e-12 * (1.0 + f.norm_sqr()));
        }
    }

    #[test]
    fn sequential_and_parallel_products_agree() {
        let g = TimeGrid::unit(6).unwrap();
        let mut rng = rng_for(19, 0);
        let x = random_element(&mut rng, g, 3);
        let y = random_element(&mut rng, g, 3);
        let a = x.multiply_with(&y, Execution::Sequential).unwrap();
        let b = x.multiply_with(&y, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mixed_grids_rejected() {
        let a = psi(TimeGrid::unit(3).unwrap(), 1);
        let b = psi(TimeGrid::new(3, 0.5).unwrap(), 1);
        assert!(a.multiply(&b).is_err());
        assert!(a.l2_inner(&b).is_err());
    }
}
