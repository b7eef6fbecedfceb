//! Jordan–Wigner matrix representation of the Clifford algebra.
//!
//! `Ψ_k = Z^{⊗(k-1)} ⊗ X ⊗ I^{⊗(d-k)}` on `(ℂ²)^{⊗d}`, vacuum `Ω` the first
//! basis vector. Each monomial `Ψ_{S_1}⋯Ψ_{S_n}` has one nonzero entry per
//! column, so monomials are stored as a row map plus phases and assembled
//! into dense matrices only on demand.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::antisym::AntiTensor;
use crate::chaos::CliffordElement;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::par::Execution;
use crate::slots::SlotSet;

pub const DEFAULT_MAX_SLOTS: usize = 10;
pub const MAX_SLOTS_ENV: &str = "CLIFFORD_MAX_DIM";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Oracle cap on `d`, from `CLIFFORD_MAX_DIM` when set.
pub fn dimension_cap() -> usize {
    std::env::var(MAX_SLOTS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_SLOTS)
}

/// Column `j` has the single entry `phase[j]` in row `row[j]`.
#[derive(Debug, Clone)]
struct Monomial {
    row: Vec<usize>,
    phase: Vec<Complex64>,
}

impl Monomial {
    fn pauli(kind: char) -> Self {
        match kind {
            'I' => Monomial { row: vec![0, 1], phase: vec![ONE, ONE] },
            'X' => Monomial { row: vec![1, 0], phase: vec![ONE, ONE] },
            'Z' => Monomial { row: vec![0, 1], phase: vec![ONE, -ONE] },
            _ => unreachable!(),
        }
    }

    fn kron(&self, other: &Monomial) -> Self {
        let n = other.row.len();
        let mut row = Vec::with_capacity(self.row.len() * n);
        let mut phase = Vec::with_capacity(self.row.len() * n);
        for a in 0..self.row.len() {
            for b in 0..n {
                row.push(self.row[a] * n + other.row[b]);
                phase.push(self.phase[a] * other.phase[b]);
            }
        }
        Monomial { row, phase }
    }

    /// `self · other`.
    fn compose(&self, other: &Monomial) -> Self {
        let row = other.row.iter().map(|&r| self.row[r]).collect();
        let phase = other.row.iter().zip(&other.phase).map(|(&r, &p)| self.phase[r] * p).collect();
        Monomial { row, phase }
    }

    fn identity(dim: usize) -> Self {
        Monomial { row: (0..dim).collect(), phase: vec![ONE; dim] }
    }

    fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.row.len();
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for j in 0..dim {
            m[(self.row[j], j)] = self.phase[j];
        }
        m
    }
}

/// Precomputed monomials `Ψ_S` for every `S ⊆ {1..d}`.
#[derive(Debug, Clone)]
pub struct MatrixOracle {
    grid: TimeGrid,
    dim: usize,
    monomials: Vec<Monomial>,
}

impl MatrixOracle {
    /// Fails when `d` exceeds [`dimension_cap`].
    pub fn new(grid: TimeGrid) -> Result<Self> {
        Self::with_cap(grid, dimension_cap())
    }

    pub fn with_cap(grid: TimeGrid, cap: usize) -> Result<Self> {
        let d = grid.slots();
        if d > cap {
            let bytes = (1u128 << (2 * d.min(63))) * std::mem::size_of::<Complex64>() as u128;
            return Err(Error::DimensionCap { slots: d, cap, bytes });
        }
        let fields: Vec<Monomial> = (1..=d)
            .map(|k| {
                (1..=d)
                    .map(|i| Monomial::pauli(match i.cmp(&k) {
                        std::cmp::Ordering::Less => 'Z',
                        std::cmp::Ordering::Equal => 'X',
                        std::cmp::Ordering::Greater => 'I',
                    }))
                    .reduce(|acc, m| acc.kron(&m))
                    .expect("d ≥ 1")
            })
            .collect();
        let dim = 1usize << d;
        let mut monomials = Vec::with_capacity(dim);
        monomials.push(Monomial::identity(dim));
        for mask in 1..dim {
            let top = 63 - (mask as u64).leading_zeros() as usize;
            let rest = mask & !(1 << top);
            monomials.push(monomials[rest].compose(&fields[top]));
        }
        Ok(MatrixOracle { grid, dim, monomials })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// `2^d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> MatrixRep {
        MatrixRep { grid: self.grid, matrix: DMatrix::identity(self.dim, self.dim) }
    }

    /// `Ψ_k = Ψ(e_k)`.
    pub fn field_matrix(&self, k: usize) -> Result<MatrixRep> {
        self.grid.check_slot(k)?;
        Ok(self.monomial_matrix(SlotSet::singleton(k)))
    }

    /// `Ψ_{S_1}⋯Ψ_{S_n}` in increasing slot order.
    pub fn monomial_matrix(&self, s: SlotSet) -> MatrixRep {
        MatrixRep { grid: self.grid, matrix: self.monomials[s.bits() as usize].to_dense() }
    }

    pub fn to_matrix(&self, f: &CliffordElement) -> Result<MatrixRep> {
        self.to_matrix_with(f, Execution::default())
    }

    /// `Σ_S c_S·Ψ_S`, assembled column by column.
    pub fn to_matrix_with(&self, f: &CliffordElement, exec: Execution) -> Result<MatrixRep> {
        self.grid.ensure_same(&f.grid())?;
        let terms: Vec<(usize, Complex64)> = f.terms().map(|(s, c)| (s.bits() as usize, c)).collect();
        let columns = exec.map(self.dim, |j| {
            let mut col = vec![ZERO; self.dim];
            for &(mask, c) in &terms {
                let m = &self.monomials[mask];
                col[m.row[j]] += c * m.phase[j];
            }
            col
        });
        let matrix = DMatrix::from_iterator(self.dim, self.dim, columns.into_iter().flatten());
        Ok(MatrixRep { grid: self.grid, matrix })
    }

    /// Reads chaos coefficients off `MΩ`: `c_S = conj(phase_S(Ω))·(MΩ)_{row_S(Ω)}`.
    pub fn from_matrix(&self, m: &MatrixRep) -> Result<CliffordElement> {
        self.grid.ensure_same(&m.grid)?;
        if m.matrix.nrows() != self.dim || m.matrix.ncols() != self.dim {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, expected {}x{}",
                m.matrix.nrows(),
                m.matrix.ncols(),
                self.dim,
                self.dim
            )));
        }
        let v: Vec<Complex64> = m.matrix.column(0).iter().copied().collect();
        self.from_vacuum_vector(&v)
    }

    /// The element `F` with `FΩ = v`.
    pub fn from_vacuum_vector(&self, v: &[Complex64]) -> Result<CliffordElement> {
        if v.len() != self.dim {
            return Err(Error::InvalidInput(format!("vector has length {}, expected {}", v.len(), self.dim)));
        }
        let d = self.grid.slots();
        let mut levels: Vec<AntiTensor> = (0..=d).map(|n| AntiTensor::zero(self.grid, n)).collect();
        for (mask, mono) in self.monomials.iter().enumerate() {
            let c = mono.phase[0].conj() * v[mono.row[0]];
            if c != ZERO {
                let s = SlotSet::from_bits(mask as u64);
                levels[s.len()].accumulate(s, c);
            }
        }
        CliffordElement::from_tensors(self.grid, levels)
    }
}

const PAR_BLOCK: usize = 64;

/// Dense complex product through `matrixmultiply`'s packed kernel.
pub fn matmul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul: inner dimensions differ");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut c = DMatrix::<Complex64>::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: `Complex64` is `repr(C)` with fields `re, im`, the layout of
    // `[f64; 2]`. All three matrices are dense column-major with the extents
    // passed here, and `c` does not alias `a` or `b`.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr().cast::<[f64; 2]>(),
            1,
            m as isize,
            b.as_ptr().cast::<[f64; 2]>(),
            1,
            k as isize,
            [0.0, 0.0],
            c.as_mut_ptr().cast::<[f64; 2]>(),
            1,
            m as isize,
        );
    }
    c
}

/// A dense `2^d × 2^d` operator on the Fock space of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRep {
    grid: TimeGrid,
    matrix: DMatrix<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub value: f64,
    /// `m(P_λ) = ⟨Ω, P_λ Ω⟩`.
    pub weight: f64,
}

/// Distinct eigenvalues, ascending, with vacuum weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub points: Vec<SpectralPoint>,
}

impl Spectrum {
    /// `m(E([a, ∞)))`; eigenvalues within `1e-12·(1+|a|)` below `a` count as `≥ a`.
    pub fn tail(&self, a: f64) -> f64 {
        let cut = a - 1e-12 * (1.0 + a.abs());
        self.points.iter().filter(|p| p.value >= cut).map(|p| p.weight).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.value)
    }
}

impl MatrixRep {
    pub fn new(grid: TimeGrid, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << grid.slots();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidInput(format!("matrix must be {dim}x{dim}")));
        }
        Ok(MatrixRep { grid, matrix })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn ensure_same(&self, other: &MatrixRep) -> Result<()> {
        self.grid.ensure_same(&other.grid)
    }

    pub fn multiply(&self, other: &MatrixRep) -> Result<Self> {
        self.multiply_with(other, Execution::default())
    }

    /// Parallel over column blocks of the right factor; the blocks do not
    /// interact, so the result does not depend on `exec`.
    pub fn multiply_with(&self, other: &MatrixRep, exec: Execution) -> Result<Self> {
        self.ensure_same(other)?;
        let n = self.dim();
        if !exec.is_parallel() || n < 2 * PAR_BLOCK {
            return Ok(MatrixRep { grid: self.grid, matrix: matmul(&self.matrix, &other.matrix) });
        }
        let blocks = n.div_ceil(PAR_BLOCK);
        let parts = exec.map(blocks, |b| {
            let start = b * PAR_BLOCK;
            let cols = PAR_BLOCK.min(n - start);
            matmul(&self.matrix, &other.matrix.columns(start, cols).into_owned())
        });
        let mut matrix = DMatrix::zeros(n, n);
        for (b, part) in parts.into_iter().enumerate() {
            let start = b * PAR_BLOCK;
            matrix.columns_mut(start, part.ncols()).copy_from(&part);
        }
        Ok(MatrixRep { grid: self.grid, matrix })
    }

    pub fn add(&self, other: &MatrixRep) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(MatrixRep { grid: self.grid, matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &MatrixRep) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(MatrixRep { grid: self.grid, matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        MatrixRep { grid: self.grid, matrix: &self.matrix * k }
    }

    pub fn adjoint(&self) -> Self {
        MatrixRep { grid: self.grid, matrix: self.matrix.adjoint() }
    }

    /// `⟨Ω, MΩ⟩`.
    pub fn vacuum_expectation(&self) -> Complex64 {
        self.matrix[(0, 0)]
    }

    /// `MΩ`.
    pub fn apply_vacuum(&self) -> DVector<Complex64> {
        self.matrix.column(0).into_owned()
    }

    /// `‖MΩ‖`, the `L²(𝒞)` norm of the represented element.
    pub fn vacuum_norm(&self) -> f64 {
        self.matrix.column(0).norm()
    }

    pub fn max_abs_diff(&self, other: &MatrixRep) -> Result<f64> {
        self.ensure_same(other)?;
        Ok((&self.matrix - &other.matrix).iter().fold(0.0, |m, z| m.max(z.norm())))
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max |M - M†|`.
    pub fn self_adjoint_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.matrix.clone().singular_values().iter().fold(0.0, |m: f64, &s| m.max(s))
    }

    /// Eigenvalues and orthonormal eigenvectors (as columns) of a self-adjoint `M`.
    pub fn hermitian_eigenpairs(&self) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        let eig = self.hermitian_eigen()?;
        Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
    }

    fn hermitian_eigen(&self) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
        let residual = self.self_adjoint_residual();
        if residual > 1e-10 * (1.0 + self.max_abs()) {
            return Err(Error::NotSelfAdjoint(residual));
        }
        let sym = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(SymmetricEigen::new(sym))
    }

    /// Eigenvalues grouped within `1e-9·(1 + max|λ|)`, weights `Σ |⟨v, Ω⟩|²`.
    pub fn spectral(&self) -> Result<Spectrum> {
        let eig = self.hermitian_eigen()?;
        let mut pairs: Vec<(f64, f64)> = (0..self.dim())
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].norm_sqr()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = pairs.iter().fold(0.0f64, |m, p| m.max(p.0.abs()));
        let tol = 1e-9 * (1.0 + scale);
        let mut points: Vec<SpectralPoint> = Vec::new();
        let mut group: Vec<(f64, f64)> = Vec::new();
        let flush = |group: &mut Vec<(f64, f64)>, points: &mut Vec<SpectralPoint>| {
            if group.is_empty() {
                return;
            }
            let weight: f64 = group.iter().map(|p| p.1).sum();
            let value = group.iter().map(|p| p.0).sum::<f64>() / group.len() as f64;
            points.push(SpectralPoint { value, weight });
            group.clear();
        };
        for p in pairs {
            if let Some(first) = group.first() {
                if p.0 - first.0 > tol {
                    flush(&mut group, &mut points);
                }
            }
            group.push(p);
        }
        flush(&mut group, &mut points);
        Ok(Spectrum { points })
    }

    /// `φ(M) = V·diag(φ(λ))·V†`.
    pub fn functional_calculus(&self, phi: impl Fn(f64) -> Complex64) -> Result<Self> {
        let eig = self.hermitian_eigen()?;
        let v = &eig.eigenvectors;
        let mut scaled = v.clone();
        for (i, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phi(eig.eigenvalues[i]);
        }
        Ok(MatrixRep { grid: self.grid, matrix: matmul(&scaled, &v.adjoint()) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_element, rng_for};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn oracle(d: usize) -> MatrixOracle {
        MatrixOracle::new(TimeGrid::unit(d).unwrap()).unwrap()
    }

    #[test]
    fn field_relations() {
        let o = oracle(4);
        let id = o.identity();
        for i in 1..=4 {
            let a = o.field_matrix(i).unwrap();
            assert_eq!(a.self_adjoint_residual(), 0.0);
            assert_eq!(a.vacuum_expectation(), c(0.0));
            for j in 1..=4 {
                let b = o.field_matrix(j).unwrap();
                let anti = a.multiply(&b).unwrap().add(&b.multiply(&a).unwrap()).unwrap();
                let want = if i == j { id.scale(c(2.0)) } else { id.scale(c(0.0)) };
                assert_eq!(anti.max_abs_diff(&want).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn monomials_have_zero_vacuum_expectation() {
        let o = oracle(4);
        for mask in 1..16u64 {
            assert_eq!(o.monomial_matrix(SlotSet::from_bits(mask)).vacuum_expectation(), c(0.0));
        }
    }

    #[test]
    fn to_and_from_matrix_examples() {
        let o = oracle(3);
        let g = o.grid();
        assert_eq!(o.to_matrix(&CliffordElement::one(g)).unwrap(), o.identity());
        let f = CliffordElement::from_tensor(AntiTensor::basis(g, &[1, 2]).unwrap());
        let m = o.to_matrix(&f).unwrap();
        let sq = m.multiply(&m).unwrap();
        assert_eq!(sq.max_abs_diff(&o.identity().scale(c(-1.0))).unwrap(), 0.0);
        assert_eq!(o.from_matrix(&o.identity()).unwrap(), CliffordElement::one(g));
        let p12 = o.field_matrix(1).unwrap().multiply(&o.field_matrix(2).unwrap()).unwrap();
        assert_eq!(o.from_matrix(&p12).unwrap(), f);
    }

    #[test]
    fn round_trip_and_unitarity() {
        let o = MatrixOracle::new(TimeGrid::new(5, 0.5).unwrap()).unwrap();
        let mut rng = rng_for(41, 0);
        for _ in 0..10 {
            let x = random_element(&mut rng, o.grid(), 5);
            let m = o.to_matrix(&x).unwrap();
            assert!((m.vacuum_norm() - x.norm()).abs() < 1e-12);
            assert!((m.vacuum_expectation() - x.state()).norm() < 1e-14);
            assert!(o.from_matrix(&m).unwrap().max_abs_diff(&x).unwrap() < 1e-14);
        }
    }

    #[test]
    fn parallel_assembly_matches() {
        let o = oracle(6);
        let mut rng = rng_for(43, 0);
        let x = random_element(&mut rng, o.grid(), 3);
        let a = o.to_matrix_with(&x, Execution::Sequential).unwrap();
        let b = o.to_matrix_with(&x, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let p = a.multiply_with(&b, Execution::Parallel).unwrap();
        let s = a.multiply_with(&b, Execution::Sequential).unwrap();
        assert!(p.max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn spectral_examples() {
        let o = oracle(3);
        let p1 = o.field_matrix(1).unwrap();
        let spec = p1.spectral().unwrap();
        assert_eq!(spec.points.len(), 2);
        assert!((spec.points[0].value + 1.0).abs() < 1e-12);
        assert!((spec.points[0].weight - 0.5).abs() < 1e-12);
        assert!((spec.points[1].value - 1.0).abs() < 1e-12);
        assert!((spec.total_weight() - 1.0).abs() < 1e-12);
        assert!((p1.operator_norm() - 1.0).abs() < 1e-12);
        let neg = p1.scale(c(-1.0)).spectral().unwrap();
        assert!((spec.tail(1e-9) + neg.tail(1e-9) - 1.0).abs() < 1e-12);
        let ij = o.field_matrix(1).unwrap().multiply(&o.field_matrix(2).unwrap()).unwrap();
        assert!(matches!(ij.spectral(), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn functional_calculus_examples() {
        let g = TimeGrid::new(3, 0.5).unwrap();
        let o = MatrixOracle::new(g).unwrap();
        let psi_t = CliffordElement::field(&g.indicator_vector(g.full()).unwrap()).unwrap();
        let m = o.to_matrix(&psi_t).unwrap();
        let sq = m.functional_calculus(|x| c(x * x)).unwrap();
        assert!(sq.max_abs_diff(&o.identity().scale(c(1.5))).unwrap() < 1e-12);
        assert!(m.functional_calculus(|x| c(x)).unwrap().max_abs_diff(&m).unwrap() < 1e-12);

        let p1 = o.field_matrix(1).unwrap();
        let s = 0.7f64;
        let e = p1.functional_calculus(|x| Complex64::new(0.0, s * x).exp()).unwrap();
        let want = o.identity().scale(c(s.cos())).add(&p1.scale(Complex64::new(0.0, s.sin()))).unwrap();
        assert!(e.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let g = TimeGrid::unit(5).unwrap();
        match MatrixOracle::with_cap(g, 4) {
            Err(Error::DimensionCap { slots: 5, cap: 4, bytes }) => assert_eq!(bytes, 16 * 1024),
            other => panic!("unexpected {other:?}"),
        }
    }
}
