//! Adapted processes, the Itô–Clifford integral and the Clark–Ocone formula.
//!
//! Adaptedness at slot `k` means every coefficient of `u_k` lives on slots
//! strictly below `k`. Integrals are left integrals: the increment `ΔΨ_k`
//! multiplies `u_k` from the left.

use num_complex::Complex64;

use crate::chaos::CliffordElement;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::malliavin::{derivative_at, ProcessElement};
use crate::slots::SlotSet;

/// First `(slot, dependency)` pair violating adaptedness, if any.
pub fn adaptedness_violation(u: &ProcessElement) -> Option<(usize, usize)> {
    (1..=u.grid().slots()).find_map(|k| {
        let future = u.component(k).support().difference(SlotSet::prefix(k - 1));
        future.iter().next().map(|j| (k, j))
    })
}

pub fn check_adapted(u: &ProcessElement) -> bool {
    adaptedness_violation(u).is_none()
}

/// A [`ProcessElement`] known to be adapted.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedProcess(ProcessElement);

impl AdaptedProcess {
    pub fn new(u: ProcessElement) -> Result<Self> {
        match adaptedness_violation(&u) {
            None => Ok(AdaptedProcess(u)),
            Some((slot, dependency)) => Err(Error::NotAdapted { slot, dependency }),
        }
    }

    pub fn process(&self) -> &ProcessElement {
        &self.0
    }

    pub fn into_inner(self) -> ProcessElement {
        self.0
    }
}

/// `ΔΨ_k = Δ^{1/2}·J_1(e_k)`.
pub fn increment(grid: TimeGrid, k: usize) -> Result<CliffordElement> {
    Ok(CliffordElement::field_basis(grid, k)?.scale_real(grid.width().sqrt()))
}

/// `Σ_k ΔΨ_k·u_k`.
pub fn ito_integral(u: &AdaptedProcess) -> CliffordElement {
    let grid = u.0.grid();
    let mut out = CliffordElement::zero(grid);
    for k in 1..=grid.slots() {
        let step = increment(grid, k).expect("slot in range").multiply(u.0.component(k)).expect("same grid");
        out.add_scaled(&step, Complex64::new(1.0, 0.0));
    }
    out
}

/// `m(F | 𝒞_{t_k})`, conditioning on slots `1..=k`; `k = 0` gives `m(F)`.
pub fn martingale_projection(f: &CliffordElement, k: usize) -> Result<CliffordElement> {
    if k > f.grid().slots() {
        return Err(Error::SlotOutOfRange { slot: k, slots: f.grid().slots() });
    }
    Ok(f.cond_expect(SlotSet::prefix(k)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClarkOcone {
    pub mean: Complex64,
    pub integrand: AdaptedProcess,
}

impl ClarkOcone {
    /// `m(F) + ∫ dΨ·u`.
    pub fn reconstruct(&self) -> CliffordElement {
        let grid = self.integrand.process().grid();
        &CliffordElement::scalar(grid, self.mean) + &ito_integral(&self.integrand)
    }
}

/// `F = m(F) + Σ_k ΔΨ_k·m(𝒟_kF | 𝒞_{t_{k-1}})`.
pub fn clark_ocone(f: &CliffordElement) -> ClarkOcone {
    let grid = f.grid();
    let u = ProcessElement::from_fn(grid, |k| {
        derivative_at(f, k).expect("slot in range").cond_expect(SlotSet::prefix(k - 1))
    })
    .expect("one component per slot");
    ClarkOcone { mean: f.state(), integrand: AdaptedProcess::new(u).expect("conditioned on the strict past") }
}
