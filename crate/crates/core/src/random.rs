//! Seeded random tensors, elements and processes for property sweeps.
//!
//! Case `i` of a sweep with seed `s` draws from ChaCha8 seeded with `s` on
//! stream `i`, so cases are independent of execution order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::antisym::AntiTensor;
use crate::chaos::CliffordElement;
use crate::grid::TimeGrid;
use crate::malliavin::ProcessElement;
use crate::slots::{subsets_of_size, SlotSet};

pub type CaseRng = ChaCha8Rng;

pub fn rng_for(seed: u64, case: u64) -> CaseRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

fn uniform(rng: &mut CaseRng) -> f64 {
    rng.random_range(-1.0..1.0)
}

/// Complex coefficients i.i.d. uniform on `[-1, 1]²`, one per wedge basis vector.
pub fn random_tensor(rng: &mut CaseRng, grid: TimeGrid, degree: usize) -> AntiTensor {
    let entries = subsets_of_size(grid.full(), degree)
        .into_iter()
        .map(|s| (s, Complex64::new(uniform(rng), uniform(rng))))
        .collect::<Vec<_>>();
    AntiTensor::from_entries(grid, degree, entries).expect("subsets lie in the grid")
}

/// Real coefficients i.i.d. uniform on `[-1, 1]`.
pub fn random_real_tensor(rng: &mut CaseRng, grid: TimeGrid, degree: usize) -> AntiTensor {
    let entries = subsets_of_size(grid.full(), degree)
        .into_iter()
        .map(|s| (s, Complex64::new(uniform(rng), 0.0)))
        .collect::<Vec<_>>();
    AntiTensor::from_entries(grid, degree, entries).expect("subsets lie in the grid")
}

/// Phase making `J_q(f)` self-adjoint for real `f`: `J_q(f)* = (-1)^{q(q-1)/2} J_q(f)`.
pub fn self_adjoint_phase(degree: usize) -> Complex64 {
    if matches!(degree % 4, 0 | 1) {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::i()
    }
}

/// Real tensor times the self-adjoint phase, normalized to `⟨f, f⟩ = 1`.
pub fn random_self_adjoint_tensor(rng: &mut CaseRng, grid: TimeGrid, degree: usize) -> AntiTensor {
    let f = random_real_tensor(rng, grid, degree);
    let norm = f.norm_sqr().sqrt();
    if norm == 0.0 {
        return f;
    }
    f.scale(self_adjoint_phase(degree) / norm)
}

pub fn random_element(rng: &mut CaseRng, grid: TimeGrid, max_degree: usize) -> CliffordElement {
    let levels = (0..=max_degree.min(grid.slots())).map(|n| random_tensor(rng, grid, n));
    CliffordElement::from_tensors(grid, levels).expect("levels share the grid")
}

pub fn random_self_adjoint_element(rng: &mut CaseRng, grid: TimeGrid, max_degree: usize) -> CliffordElement {
    let levels = (0..=max_degree.min(grid.slots())).map(|n| random_self_adjoint_tensor(rng, grid, n));
    CliffordElement::from_tensors(grid, levels).expect("levels share the grid")
}

pub fn random_process(rng: &mut CaseRng, grid: TimeGrid, max_degree: usize) -> ProcessElement {
    let slots = (0..grid.slots()).map(|_| random_element(rng, grid, max_degree)).collect();
    ProcessElement::from_components(grid, slots).expect("components share the grid")
}

/// Each `u_k` supported on slots `1..k-1`.
pub fn random_adapted_process(rng: &mut CaseRng, grid: TimeGrid, max_degree: usize) -> ProcessElement {
    let slots = (1..=grid.slots())
        .map(|k| random_element(rng, grid, max_degree).cond_expect(SlotSet::prefix(k - 1)))
        .collect();
    ProcessElement::from_components(grid, slots).expect("components share the grid")
}

/// Real degree-1 tensor of plain norm 1.
pub fn random_unit_vector(rng: &mut CaseRng, grid: TimeGrid) -> AntiTensor {
    loop {
        let z = random_real_tensor(rng, grid, 1);
        let n = z.plain_l2_norm();
        if n > 1e-3 {
            return z.scale(Complex64::new(1.0 / n, 0.0));
        }
    }
}

/// Each slot included with probability 1/2.
pub fn random_subset(rng: &mut CaseRng, grid: TimeGrid) -> SlotSet {
    SlotSet::from_bits(rng.random::<u64>() & grid.full().bits())
}
