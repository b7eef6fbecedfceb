//! The derivation `𝒟_t`, the divergence `δ` and the number operator.
//!
//! At finite dimension every chaos expansion has finitely many terms, so the
//! domains of `𝒟` and `δ` are the whole space and closability is automatic.

use num_complex::Complex64;

use crate::antisym::AntiTensor;
use crate::chaos::CliffordElement;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::par::Execution;
use crate::slots::SlotSet;

/// A slot-indexed family `u_1, …, u_d` of Clifford elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessElement {
    grid: TimeGrid,
    components: Vec<CliffordElement>,
}

impl ProcessElement {
    pub fn zero(grid: TimeGrid) -> Self {
        ProcessElement { grid, components: vec![CliffordElement::zero(grid); grid.slots()] }
    }

    pub fn from_components(grid: TimeGrid, components: Vec<CliffordElement>) -> Result<Self> {
        if components.len() != grid.slots() {
            return Err(Error::InvalidInput(format!(
                "process needs {} components, got {}",
                grid.slots(),
                components.len()
            )));
        }
        for u in &components {
            grid.ensure_same(&u.grid())?;
        }
        Ok(ProcessElement { grid, components })
    }

    /// Builds `u_k = f(k)` for `k = 1..=d`.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(usize) -> CliffordElement) -> Result<Self> {
        Self::from_components(grid, (1..=grid.slots()).map(f).collect())
    }

    /// `h ⊗ F`: slot `k` carries the pointwise value `h(k) = c_k / Δ^{1/2}` times `F`.
    pub fn tensor(h: &AntiTensor, f: &CliffordElement) -> Result<Self> {
        if h.degree() != 1 {
            return Err(Error::DegreeMismatch { left: h.degree(), right: 1 });
        }
        let grid = h.grid();
        grid.ensure_same(&f.grid())?;
        let scale = 1.0 / grid.width().sqrt();
        Self::from_fn(grid, |k| f.scale(h.coeff(SlotSet::singleton(k)) * scale))
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// # Panics
    /// If `k` is outside `1..=d`.
    pub fn component(&self, k: usize) -> &CliffordElement {
        &self.components[k - 1]
    }

    pub fn components(&self) -> &[CliffordElement] {
        &self.components
    }

    pub fn map(&self, f: impl Fn(usize, &CliffordElement) -> CliffordElement) -> Self {
        let components = self.components.iter().enumerate().map(|(i, u)| f(i + 1, u)).collect();
        ProcessElement { grid: self.grid, components }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        self.map(|_, u| u.scale(k))
    }

    pub fn try_add(&self, other: &ProcessElement) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.map(|k, u| u + other.component(k)))
    }

    pub fn try_sub(&self, other: &ProcessElement) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.map(|k, u| u - other.component(k)))
    }

    /// `⟨u, v⟩ = Δ Σ_k ⟨u_k, v_k⟩_{L²(𝒞)}`.
    pub fn inner(&self, other: &ProcessElement) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        let sum: Complex64 = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(u, v)| u.l2_inner(v).expect("same grid"))
            .sum();
        Ok(sum * self.grid.width())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.width() * self.components.iter().map(CliffordElement::norm_sqr).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn distance(&self, other: &ProcessElement) -> Result<f64> {
        Ok(self.try_sub(other)?.norm())
    }

    /// Largest coefficient modulus over all components of `u - v`.
    pub fn max_abs_diff(&self, other: &ProcessElement) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(u, v)| u.max_abs_diff(v).expect("same grid"))
            .fold(0.0, f64::max))
    }
}

/// `𝒟_k F = Σ_n n·J_{n-1}(f_n(k, ·))`.
pub fn derivative_at(f: &CliffordElement, k: usize) -> Result<CliffordElement> {
    let grid = f.grid();
    grid.check_slot(k)?;
    let slices = f.levels()[1..]
        .iter()
        .filter(|fn_| fn_.nnz() > 0)
        .map(|fn_| {
            let n = fn_.degree() as f64;
            fn_.slice_first(k).map(|s| s.scale(Complex64::new(n, 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    CliffordElement::from_tensors(grid, slices)
}

pub fn derivative(f: &CliffordElement) -> ProcessElement {
    derivative_with(f, Execution::default())
}

pub fn derivative_with(f: &CliffordElement, exec: Execution) -> ProcessElement {
    let grid = f.grid();
    let components = exec.map(grid.slots(), |i| derivative_at(f, i + 1).expect("slot in range"));
    ProcessElement::from_components(grid, components).expect("one component per slot")
}

/// `δ(u) = Σ_n J_{n+1}(ŵ_n)` where `w_n(k, ·)` is the level-`n` kernel of `u_k`.
///
/// On coefficients, `c_U = Δ^{1/2} Σ_i (-1)^{i-1} a^{U_i}_{U∖U_i}` with
/// `a^k_T` the level-`n` coefficients of `u_k`.
pub fn divergence(u: &ProcessElement) -> CliffordElement {
    let grid = u.grid();
    let root = grid.width().sqrt();
    let mut out = CliffordElement::zero(grid);
    for k in 1..=grid.slots() {
        let slot = SlotSet::singleton(k);
        for level in u.component(k).levels() {
            if level.nnz() == 0 || level.degree() >= grid.slots() {
                continue;
            }
            let mut raised = AntiTensor::zero(grid, level.degree() + 1);
            for (t, a) in level.iter().filter(|(t, _)| !t.contains(k)) {
                let sign = if t.count_below(k) % 2 == 0 { 1.0 } else { -1.0 };
                raised.accumulate(t.union(slot), a * (sign * root));
            }
            out.add_scaled(&CliffordElement::from_tensor(raised), Complex64::new(1.0, 0.0));
        }
    }
    out
}

/// `R = δ∘𝒟`: multiplies chaos level `n` by `n`.
pub fn number_operator(f: &CliffordElement) -> CliffordElement {
    f.map_levels(|fn_| fn_.scale(Complex64::new(fn_.degree() as f64, 0.0)))
}

/// `R^{-1}` on centred elements: divides level `n ≥ 1` by `n`.
pub fn inv_number(f: &CliffordElement) -> Result<CliffordElement> {
    let m = f.state();
    if m.norm() > 1e-12 * (1.0 + f.norm()) {
        return Err(Error::NotCentred(m));
    }
    Ok(f.map_levels(|fn_| match fn_.degree() {
        0 => AntiTensor::zero(fn_.grid(), 0),
        n => fn_.scale(Complex64::new(1.0 / n as f64, 0.0)),
    }))
}

/// `⟨u, v⟩` as an algebra element: `Δ Σ_k u_k*·v_k`.
pub fn process_pairing(u: &ProcessElement, v: &ProcessElement) -> Result<CliffordElement> {
    let grid = u.grid();
    grid.ensure_same(&v.grid())?;
    let mut out = CliffordElement::zero(grid);
    for k in 1..=grid.slots() {
        let term = u.component(k).adjoint().multiply(v.component(k))?;
        out.add_scaled(&term, Complex64::new(grid.width(), 0.0));
    }
    Ok(out)
}

/// Carré du champ `‖𝒟.F‖² = Δ Σ_k (𝒟_kF)*(𝒟_kF)`.
pub fn carre_norm(f: &CliffordElement) -> CliffordElement {
    let d = derivative(f);
    process_pairing(&d, &d).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_element, random_process, rng_for};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn psi(g: TimeGrid, k: usize) -> CliffordElement {
        CliffordElement::field_basis(g, k).unwrap()
    }

    fn j(g: TimeGrid, slots: &[usize]) -> CliffordElement {
        CliffordElement::from_tensor(AntiTensor::basis(g, slots).unwrap())
    }

    fn spike(g: TimeGrid, at: usize, f: &CliffordElement) -> ProcessElement {
        let e = AntiTensor::basis(g, &[at]).unwrap();
        ProcessElement::tensor(&e, f).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let g = TimeGrid::new(3, 0.25).unwrap();
        let d = derivative(&psi(g, 2));
        for k in 1..=3 {
            let want = if k == 2 { 2.0 } else { 0.0 };
            assert_eq!(d.component(k).state(), c(want));
        }
        assert_eq!(derivative(&CliffordElement::one(g)), ProcessElement::zero(g));

        let g = TimeGrid::unit(3).unwrap();
        let d = derivative(&j(g, &[1, 2]));
        assert_eq!(d.component(1), &psi(g, 2));
        assert_eq!(d.component(2), &-&psi(g, 1));
        assert_eq!(d.component(3), &CliffordElement::zero(g));
    }

    #[test]
    fn divergence_examples() {
        for width in [1.0, 0.5] {
            let g = TimeGrid::new(3, width).unwrap();
            let one = CliffordElement::one(g);
            let u = spike(g, 1, &one);
            assert!(divergence(&u).max_abs_diff(&psi(g, 1)).unwrap() < 1e-15);
            assert_eq!(divergence(&spike(g, 1, &psi(g, 1))), CliffordElement::zero(g));
            let got = divergence(&spike(g, 1, &psi(g, 2)));
            assert!(got.max_abs_diff(&j(g, &[1, 2])).unwrap() < 1e-15);
        }
    }

    #[test]
    fn number_operator_examples() {
        let g = TimeGrid::unit(3).unwrap();
        assert_eq!(number_operator(&CliffordElement::one(g)), CliffordElement::zero(g));
        assert_eq!(number_operator(&psi(g, 1)), psi(g, 1));
        let f = j(g, &[1, 2]);
        let rf = number_operator(&f);
        assert_eq!(rf, f.scale_real(2.0));
        assert_eq!(inv_number(&rf).unwrap(), f);
        assert!(matches!(inv_number(&CliffordElement::one(g)), Err(Error::NotCentred(_))));
    }

    #[test]
    fn number_operator_is_divergence_of_derivative() {
        let g = TimeGrid::new(4, 0.5).unwrap();
        let mut rng = rng_for(23, 0);
        let x = random_element(&mut rng, g, 4);
        let lhs = divergence(&derivative(&x));
        assert!(lhs.max_abs_diff(&number_operator(&x)).unwrap() < 1e-12);
    }

    #[test]
    fn carre_norm_examples() {
        let g = TimeGrid::new(2, 0.5).unwrap();
        let z = g.indicator_vector(SlotSet::singleton(1)).unwrap().scale(c(2.0f64.sqrt()));
        let cn = carre_norm(&CliffordElement::field(&z).unwrap());
        assert!(cn.max_abs_diff(&CliffordElement::one(g)).unwrap() < 1e-14);
        let g = TimeGrid::unit(3).unwrap();
        let cn = carre_norm(&j(g, &[1, 2]));
        assert!(cn.max_abs_diff(&CliffordElement::scalar(g, c(2.0))).unwrap() < 1e-14);
    }

    #[test]
    fn derivative_divergence_adjoint() {
        let g = TimeGrid::new(5, 0.5).unwrap();
        let mut rng = rng_for(29, 0);
        for _ in 0..10 {
            let x = random_element(&mut rng, g, 4);
            let u = random_process(&mut rng, g, 3);
            let lhs = derivative(&x).inner(&u).unwrap();
            let rhs = x.l2_inner(&divergence(&u)).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn process_inner_scales_with_width() {
        let g = TimeGrid::new(2, 0.5).unwrap();
        let u = spike(g, 1, &CliffordElement::one(g));
        // h = e_1, ‖h‖² = 1
        assert!((u.norm_sqr() - 1.0).abs() < 1e-15);
    }
}
