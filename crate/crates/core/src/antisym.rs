//! Antisymmetric coefficient tensors `f ∈ Λ_n` over a [`TimeGrid`].
//!
//! Storage is sparse in the orthonormal wedge basis `e_{i_1}∧…∧e_{i_n}`,
//! `i_1 < … < i_n`. The pointwise dictionary is
//!
//! ```text
//! f(t_1, …, t_n) = sgn(σ)·c_S / (n!·Δ^{n/2})
//! ```
//!
//! where `σ` sorts the slot tuple into `S`; repeated slots give zero.
//! [`DenseAntiFn`] holds the full `d^n` value array and is the reference
//! semantics for contractions.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::slots::{merge_sign, subsets_of_size, SlotSet};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest dense array [`DenseAntiFn`] will allocate.
pub const DENSE_LIMIT: usize = 1 << 24;

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(-1)^{n(n-1)/2}`, the sign of the order-reversing permutation.
pub(crate) fn reversal_sign(n: usize) -> f64 {
    if (n * n.saturating_sub(1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the permutation sorting `tuple`, or `None` on a repeated entry.
fn sort_sign(tuple: &[usize]) -> Option<f64> {
    let mut inversions = 0usize;
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] == tuple[j] {
                return None;
            }
            if tuple[i] > tuple[j] {
                inversions += 1;
            }
        }
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Every permutation of `0..n` with its sign.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        let n = used.len();
        if prefix.len() == n {
            out.push((prefix.clone(), sign));
            return;
        }
        // picking the j-th unused element jumps over j smaller unused ones
        let mut rank = 0;
        for i in 0..n {
            if used[i] {
                continue;
            }
            used[i] = true;
            prefix.push(i);
            let s = if rank % 2 == 0 { sign } else { -sign };
            go(prefix, used, s, out);
            prefix.pop();
            used[i] = false;
            rank += 1;
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], 1.0, &mut out);
    out
}

/// Degree-`n` antisymmetric tensor in wedge coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiTensor {
    degree: usize,
    grid: TimeGrid,
    coeffs: BTreeMap<SlotSet, Complex64>,
}

impl AntiTensor {
    pub fn zero(grid: TimeGrid, degree: usize) -> Self {
        AntiTensor { degree, grid, coeffs: BTreeMap::new() }
    }

    /// Degree-0 tensor holding `c`.
    pub fn scalar(grid: TimeGrid, c: Complex64) -> Self {
        let mut t = Self::zero(grid, 0);
        t.accumulate(SlotSet::EMPTY, c);
        t
    }

    /// `e_{i_1} ∧ … ∧ e_{i_n}` for slots in the given (not necessarily sorted)
    /// order; zero when a slot repeats.
    pub fn basis(grid: TimeGrid, slots: &[usize]) -> Result<Self> {
        for &k in slots {
            grid.check_slot(k)?;
        }
        let mut t = Self::zero(grid, slots.len());
        if let Some(sign) = sort_sign(slots) {
            t.accumulate(SlotSet::from_slots(slots.iter().copied())?, Complex64::new(sign, 0.0));
        }
        Ok(t)
    }

    /// Collects `(S, c_S)` pairs, summing repeats. Every `S` must have `degree`
    /// members inside the grid.
    pub fn from_entries<I>(grid: TimeGrid, degree: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SlotSet, Complex64)>,
    {
        let mut t = Self::zero(grid, degree);
        for (s, c) in entries {
            grid.check_set(s)?;
            if s.len() != degree {
                return Err(Error::DegreeMismatch { left: s.len(), right: degree });
            }
            t.accumulate(s, c);
        }
        Ok(t)
    }

    /// Adds `c` to the coefficient of `s`; no validation.
    pub(crate) fn accumulate(&mut self, s: SlotSet, c: Complex64) {
        debug_assert_eq!(s.len(), self.degree);
        if c == ZERO {
            return;
        }
        *self.coeffs.entry(s).or_insert(ZERO) += c;
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn coeff(&self, s: SlotSet) -> Complex64 {
        self.coeffs.get(&s).copied().unwrap_or(ZERO)
    }

    /// Nonzero-stored coefficients in increasing mask order.
    pub fn iter(&self) -> impl Iterator<Item = (SlotSet, Complex64)> + '_ {
        self.coeffs.iter().map(|(s, c)| (*s, *c))
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| *c == ZERO)
    }

    fn ensure_compatible(&self, other: &AntiTensor) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { left: self.degree, right: other.degree });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(SlotSet, Complex64) -> Complex64) -> Self {
        let mut t = Self::zero(self.grid, self.degree);
        for (s, c) in self.iter() {
            t.accumulate(s, f(s, c));
        }
        t
    }

    pub fn scale(&self, k: Complex64) -> Self {
        self.map(|_, c| c * k)
    }

    pub fn add(&self, other: &AntiTensor) -> Result<Self> {
        self.ensure_compatible(other)?;
        let mut t = self.clone();
        t.add_scaled(other, Complex64::new(1.0, 0.0));
        Ok(t)
    }

    pub fn sub(&self, other: &AntiTensor) -> Result<Self> {
        self.ensure_compatible(other)?;
        let mut t = self.clone();
        t.add_scaled(other, Complex64::new(-1.0, 0.0));
        Ok(t)
    }

    /// `self += k·other`; caller guarantees compatibility.
    pub(crate) fn add_scaled(&mut self, other: &AntiTensor, k: Complex64) {
        debug_assert!(self.ensure_compatible(other).is_ok());
        for (s, c) in other.iter() {
            self.accumulate(s, k * c);
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|_, c| c.conj())
    }

    /// `←f(x_1, …, x_n) = f(x_n, …, x_1)`, a pure sign for antisymmetric `f`.
    pub fn reverse(&self) -> Self {
        let s = reversal_sign(self.degree);
        self.map(|_, c| c * s)
    }

    /// `⟨f, g⟩_{Λ_n} = Σ_S conj(c^f_S)·c^g_S`.
    pub fn inner(&self, other: &AntiTensor) -> Result<Complex64> {
        self.ensure_compatible(other)?;
        Ok(self.iter().map(|(s, c)| c.conj() * other.coeff(s)).sum())
    }

    /// `⟨f, f⟩_{Λ_n}`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().fold(0.0, |acc, c| acc + c.norm_sqr())
    }

    /// Plain `L²(ℝ₊^n)` norm, `(⟨f, f⟩_{Λ_n} / n!)^{1/2}`.
    pub fn plain_l2_norm(&self) -> f64 {
        (self.norm_sqr() / factorial(self.degree)).sqrt()
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &AntiTensor) -> Result<f64> {
        Ok(self.sub(other)?.coeffs.values().fold(0.0, |m, c| m.max(c.norm())))
    }

    /// Pointwise value at a slot tuple of length `degree` (slots from 1).
    pub fn value_at(&self, tuple: &[usize]) -> Result<Complex64> {
        if tuple.len() != self.degree {
            return Err(Error::DegreeMismatch { left: tuple.len(), right: self.degree });
        }
        for &k in tuple {
            self.grid.check_slot(k)?;
        }
        Ok(match sort_sign(tuple) {
            None => ZERO,
            Some(sign) => {
                let s = SlotSet::from_slots(tuple.iter().copied())?;
                self.coeff(s) * (sign / self.pointwise_scale())
            }
        })
    }

    fn pointwise_scale(&self) -> f64 {
        factorial(self.degree) * self.grid.width().powf(self.degree as f64 / 2.0)
    }

    /// First-argument slice `f(k, ·)` as a degree `n-1` tensor.
    pub fn slice_first(&self, k: usize) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::InvalidInput("cannot slice a degree-0 tensor".into()));
        }
        self.grid.check_slot(k)?;
        let mut t = Self::zero(self.grid, self.degree - 1);
        let scale = 1.0 / (self.degree as f64 * self.grid.width().sqrt());
        for (s, c) in self.iter() {
            if let Some(pos) = s.position(k) {
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                t.accumulate(s.difference(SlotSet::singleton(k)), c * (sign * scale));
            }
        }
        Ok(t)
    }

    /// Keeps coefficients supported inside `a` (the kernel `f·1_A^{⊗n}`).
    pub fn restrict(&self, a: SlotSet) -> Self {
        let mut t = Self::zero(self.grid, self.degree);
        for (s, c) in self.iter().filter(|(s, _)| s.is_subset(a)) {
            t.accumulate(s, c);
        }
        t
    }

    /// Union of supports of all stored coefficients.
    pub fn support(&self) -> SlotSet {
        self.coeffs.keys().fold(SlotSet::EMPTY, |acc, s| acc.union(*s))
    }

    /// `f ∧ g`, the antisymmetrization of `f ⊗ g`.
    pub fn wedge(&self, other: &AntiTensor) -> Result<Self> {
        self.contract_hat(other, 0)
    }

    /// `f ∧̂_r g` computed on wedge coefficients.
    ///
    /// For `S ∩ T = R` with `|R| = r`, `A = S∖R`, `B = T∖R`, the pair
    /// contributes to `e_{A∪B}` with weight
    /// `(p-r)!(q-r)!r!/(p!q!)·(-1)^{r(r-1)/2}·ε(A,R)·ε(R,B)·ε(A,B)`, where
    /// `ε` is the merge sign. Pairs with `|S ∩ T| ≠ r` vanish. The
    /// equivalence with [`contract`] is exercised in the tests.
    pub fn contract_hat(&self, other: &AntiTensor, r: usize) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let (p, q) = (self.degree, other.degree);
        if r > p.min(q) {
            return Err(Error::ContractionOrder { r, p, q });
        }
        let mut out = Self::zero(self.grid, p + q - 2 * r);
        if p + q - 2 * r > self.grid.slots() {
            return Ok(out);
        }
        let w = factorial(p - r) * factorial(q - r) * factorial(r) / (factorial(p) * factorial(q))
            * reversal_sign(r);
        for (s, a) in self.iter() {
            for (t, b) in other.iter() {
                let common = s.intersection(t);
                if common.len() != r {
                    continue;
                }
                let left = s.difference(common);
                let right = t.difference(common);
                let sign = merge_sign(left, common) * merge_sign(common, right) * merge_sign(left, right);
                out.accumulate(left.union(right), a * b * (w * sign));
            }
        }
        Ok(out)
    }

    /// `f ∧̂_r g` for every `r = 0..=min(p, q)` in one pass over coefficient pairs.
    pub fn contract_hat_all(&self, other: &AntiTensor) -> Result<Vec<Self>> {
        self.grid.ensure_same(&other.grid)?;
        let (p, q) = (self.degree, other.degree);
        let d = self.grid.slots();
        let mut out: Vec<Self> = (0..=p.min(q)).map(|r| Self::zero(self.grid, p + q - 2 * r)).collect();
        let weights: Vec<f64> = (0..=p.min(q))
            .map(|r| {
                factorial(p - r) * factorial(q - r) * factorial(r) / (factorial(p) * factorial(q))
                    * reversal_sign(r)
            })
            .collect();
        for (s, a) in self.iter() {
            for (t, b) in other.iter() {
                let common = s.intersection(t);
                let r = common.len();
                if p + q - 2 * r > d {
                    continue;
                }
                let left = s.difference(common);
                let right = t.difference(common);
                let sign = merge_sign(left, common) * merge_sign(common, right) * merge_sign(left, right);
                out[r].accumulate(left.union(right), a * b * (weights[r] * sign));
            }
        }
        Ok(out)
    }

    /// Full pointwise array.
    pub fn to_dense(&self) -> Result<DenseAntiFn> {
        let mut out = DenseAntiFn::zeros(self.grid, self.degree)?;
        let perms = signed_permutations(self.degree);
        let scale = 1.0 / self.pointwise_scale();
        for (s, c) in self.iter() {
            let members = s.to_vec();
            for (perm, sign) in &perms {
                let tuple: Vec<usize> = perm.iter().map(|&i| members[i]).collect();
                let at = out.offset(&tuple);
                out.values[at] = c * (sign * scale);
            }
        }
        Ok(out)
    }
}

/// Dense array of `d^n` pointwise values, indexed by slot tuples (slots from 1).
/// Antisymmetric when produced by [`AntiTensor::to_dense`]; general otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseAntiFn {
    degree: usize,
    grid: TimeGrid,
    values: Vec<Complex64>,
}

impl DenseAntiFn {
    pub fn zeros(grid: TimeGrid, degree: usize) -> Result<Self> {
        let len = grid
            .slots()
            .checked_pow(degree as u32)
            .filter(|&n| n <= DENSE_LIMIT)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "dense array of degree {degree} over {} slots exceeds {DENSE_LIMIT} entries",
                    grid.slots()
                ))
            })?;
        Ok(DenseAntiFn { degree, grid, values: vec![ZERO; len] })
    }

    /// Fills every entry from `f(tuple)`.
    pub fn from_fn(grid: TimeGrid, degree: usize, f: impl Fn(&[usize]) -> Complex64) -> Result<Self> {
        let mut out = Self::zeros(grid, degree)?;
        let mut tuple = vec![1; degree];
        for i in 0..out.values.len() {
            out.values[i] = f(&tuple);
            out.advance(&mut tuple);
        }
        Ok(out)
    }

    /// Point mass `value` at one tuple.
    pub fn point_mass(grid: TimeGrid, tuple: &[usize], value: Complex64) -> Result<Self> {
        let mut out = Self::zeros(grid, tuple.len())?;
        out.set(tuple, value)?;
        Ok(out)
    }

    fn advance(&self, tuple: &mut [usize]) {
        for slot in tuple.iter_mut().rev() {
            if *slot < self.grid.slots() {
                *slot += 1;
                return;
            }
            *slot = 1;
        }
    }

    fn offset(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &k| acc * self.grid.slots() + (k - 1))
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<()> {
        if tuple.len() != self.degree {
            return Err(Error::DegreeMismatch { left: tuple.len(), right: self.degree });
        }
        tuple.iter().try_for_each(|&k| self.grid.check_slot(k))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, tuple: &[usize]) -> Result<Complex64> {
        self.check_tuple(tuple)?;
        Ok(self.values[self.offset(tuple)])
    }

    pub fn set(&mut self, tuple: &[usize], value: Complex64) -> Result<()> {
        self.check_tuple(tuple)?;
        let at = self.offset(tuple);
        self.values[at] = value;
        Ok(())
    }

    /// `(Δ^n Σ |g|²)^{1/2}`.
    pub fn plain_l2_norm(&self) -> f64 {
        let sum = self.values.iter().fold(0.0, |acc, v| acc + v.norm_sqr());
        (self.grid.width().powi(self.degree as i32) * sum).sqrt()
    }

    pub fn max_abs_diff(&self, other: &DenseAntiFn) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `(1/n!) Σ_σ sgn(σ)·g∘σ` in wedge coefficients:
    /// `c_S = Δ^{n/2} Σ_σ sgn(σ)·g(S_σ)`.
    pub fn antisymmetrize(&self) -> AntiTensor {
        let n = self.degree;
        let mut out = AntiTensor::zero(self.grid, n);
        if n > self.grid.slots() {
            return out;
        }
        let perms = signed_permutations(n);
        let scale = self.grid.width().powf(n as f64 / 2.0);
        for s in subsets_of_size(self.grid.full(), n) {
            let members = s.to_vec();
            let mut acc = ZERO;
            for (perm, sign) in &perms {
                let tuple: Vec<usize> = perm.iter().map(|&i| members[i]).collect();
                acc += self.values[self.offset(&tuple)] * *sign;
            }
            out.accumulate(s, acc * scale);
        }
        out
    }

    /// True when every transposition flips the sign, up to `tol`.
    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        let back = self.antisymmetrize().to_dense().expect("same size as self");
        self.max_abs_diff(&back) <= tol
    }
}

/// `f ∧_r g` pointwise:
/// `Δ^r Σ_s f(t_1, …, t_{p-r}, s_r, …, s_1)·g(s_1, …, s_r, u_1, …, u_{q-r})`.
pub fn contract(f: &AntiTensor, g: &AntiTensor, r: usize) -> Result<DenseAntiFn> {
    f.grid.ensure_same(&g.grid)?;
    let (p, q) = (f.degree, g.degree);
    if r > p.min(q) {
        return Err(Error::ContractionOrder { r, p, q });
    }
    let d = f.grid.slots();
    let fd = f.to_dense()?;
    let gd = g.to_dense()?;
    let mut out = DenseAntiFn::zeros(f.grid, p + q - 2 * r)?;
    let (nt, ns, nu) = (d.pow((p - r) as u32), d.pow(r as u32), d.pow((q - r) as u32));
    // flat index of the reversed shared tuple
    let reversed: Vec<usize> = (0..ns)
        .map(|s| {
            let mut digits = Vec::with_capacity(r);
            let mut x = s;
            for _ in 0..r {
                digits.push(x % d);
                x /= d;
            }
            // digits holds s least-significant first, which is the reversed tuple
            digits.iter().fold(0, |acc, &k| acc * d + k)
        })
        .collect();
    let weight = f.grid.width().powi(r as i32);
    for t in 0..nt {
        for u in 0..nu {
            let mut acc = ZERO;
            for s in 0..ns {
                acc += fd.values[t * ns + reversed[s]] * gd.values[s * nu + u];
            }
            out.values[t * nu + u] = acc * weight;
        }
    }
    Ok(out)
}

/// `f ∧̂_r g` via the dense route.
pub fn contract_hat_dense(f: &AntiTensor, g: &AntiTensor, r: usize) -> Result<AntiTensor> {
    Ok(contract(f, g, r)?.antisymmetrize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_tensor, rng_for};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn grid(d: usize) -> TimeGrid {
        TimeGrid::unit(d).unwrap()
    }

    fn e(g: TimeGrid, slots: &[usize]) -> AntiTensor {
        AntiTensor::basis(g, slots).unwrap()
    }

    fn set(v: &[usize]) -> SlotSet {
        SlotSet::from_slots(v.iter().copied()).unwrap()
    }

    #[test]
    fn signed_permutations_of_three() {
        let perms = signed_permutations(3);
        assert_eq!(perms.len(), 6);
        for (p, s) in perms {
            assert_eq!(sort_sign(&p).unwrap(), s);
        }
    }

    #[test]
    fn antisymmetrize_examples() {
        let g = grid(3);
        let pm = DenseAntiFn::point_mass(g, &[1, 2], c(1.0)).unwrap();
        assert_eq!(pm.antisymmetrize(), e(g, &[1, 2]));
        let sym = DenseAntiFn::from_fn(g, 2, |t| c((t[0] * t[1]) as f64)).unwrap();
        assert!(sym.antisymmetrize().is_zero());
        let f = e(g, &[1, 3]).add(&e(g, &[2, 3]).scale(c(-2.0))).unwrap();
        assert_eq!(f.to_dense().unwrap().antisymmetrize(), f);
        let swapped = DenseAntiFn::point_mass(g, &[2, 1], c(1.0)).unwrap().antisymmetrize();
        assert_eq!(e(g, &[1, 2]).inner(&swapped).unwrap(), c(-1.0));
    }

    #[test]
    fn antisymmetrize_above_dimension_is_zero() {
        let g = grid(2);
        let raw = DenseAntiFn::from_fn(g, 3, |_| c(1.0)).unwrap();
        let t = raw.antisymmetrize();
        assert_eq!(t.degree(), 3);
        assert!(t.is_zero());
    }

    #[test]
    fn pointwise_dictionary() {
        let g = TimeGrid::new(3, 0.5).unwrap();
        let f = e(g, &[1, 2]);
        // 1/(2!·Δ)
        assert!((f.value_at(&[1, 2]).unwrap() - c(1.0)).norm() < 1e-15);
        assert!((f.value_at(&[2, 1]).unwrap() - c(-1.0)).norm() < 1e-15);
        assert_eq!(f.value_at(&[1, 1]).unwrap(), ZERO);
        assert!((f.to_dense().unwrap().plain_l2_norm() - f.plain_l2_norm()).abs() < 1e-15);
    }

    #[test]
    fn reverse_and_conj() {
        let g = grid(4);
        let f2 = e(g, &[1, 2]);
        assert_eq!(f2.reverse(), f2.scale(c(-1.0)));
        assert_eq!(e(g, &[3]).reverse(), e(g, &[3]));
        let f4 = e(g, &[1, 2, 3, 4]);
        assert_eq!(f4.reverse(), f4);
        let i1 = e(g, &[1]).scale(Complex64::i());
        assert_eq!(i1.conj(), i1.scale(c(-1.0)));
        assert_eq!(i1.conj().conj(), i1);
    }

    #[test]
    fn inner_and_norms() {
        let g = grid(3);
        assert_eq!(e(g, &[1, 2]).inner(&e(g, &[1, 2])).unwrap(), c(1.0));
        assert_eq!(e(g, &[1, 2]).inner(&e(g, &[1, 3])).unwrap(), ZERO);
        assert!(e(g, &[1]).inner(&e(g, &[1, 2])).is_err());
        assert!((e(g, &[1, 2]).plain_l2_norm() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(e(g, &[1]).plain_l2_norm(), 1.0);
        assert_eq!(AntiTensor::zero(g, 2).plain_l2_norm(), 0.0);
    }

    #[test]
    fn wedge_examples() {
        let g = grid(3);
        assert_eq!(e(g, &[1]).wedge(&e(g, &[2])).unwrap(), e(g, &[1, 2]));
        assert!(e(g, &[1]).wedge(&e(g, &[1])).unwrap().is_zero());
        assert_eq!(e(g, &[1, 2]).wedge(&e(g, &[3])).unwrap(), e(g, &[1, 2, 3]));
        assert_eq!(e(g, &[2]).wedge(&e(g, &[1])).unwrap(), e(g, &[1, 2]).scale(c(-1.0)));
    }

    #[test]
    fn contraction_examples() {
        let g = grid(4);
        let half = e(g, &[1]).scale(c(0.5));
        let got = e(g, &[1, 2]).contract_hat(&e(g, &[2]), 1).unwrap();
        assert!(got.max_abs_diff(&half).unwrap() < 1e-15);
        assert!(e(g, &[1, 2]).contract_hat(&e(g, &[3, 4]), 1).unwrap().is_zero());
        let f = e(g, &[1, 2]);
        let s = f.contract_hat(&f, 2).unwrap();
        assert!((s.coeff(SlotSet::EMPTY) - c(-0.5)).norm() < 1e-15);
        let dense = contract(&f, &f, 2).unwrap();
        assert!((dense.get(&[]).unwrap() - c(-0.5)).norm() < 1e-15);
        assert!(f.contract_hat(&f, 3).is_err());
        assert!(contract(&f, &f, 3).is_err());
    }

    #[test]
    fn contraction_independent_of_width() {
        let g = TimeGrid::new(4, 0.3).unwrap();
        let f = e(g, &[1, 2, 3]);
        let h = e(g, &[2, 3, 4]);
        let fast = f.contract_hat(&h, 2).unwrap();
        let dense = contract_hat_dense(&f, &h, 2).unwrap();
        assert!(fast.max_abs_diff(&dense).unwrap() < 1e-14);
        assert!(!fast.is_zero());
    }

    #[test]
    fn dense_matches_coefficients_on_random_tensors() {
        let mut rng = rng_for(7, 0);
        for width in [1.0, 0.5] {
            let g = TimeGrid::new(5, width).unwrap();
            for p in 0..=3 {
                for q in 0..=3 {
                    let f = random_tensor(&mut rng, g, p);
                    let h = random_tensor(&mut rng, g, q);
                    for r in 0..=p.min(q) {
                        let fast = f.contract_hat(&h, r).unwrap();
                        let dense = contract_hat_dense(&f, &h, r).unwrap();
                        assert!(fast.max_abs_diff(&dense).unwrap() < 1e-12, "p={p} q={q} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn slice_examples() {
        let g = grid(3);
        let f = e(g, &[1, 2]);
        let s1 = f.slice_first(1).unwrap();
        assert_eq!(s1, e(g, &[2]).scale(c(0.5)));
        let s2 = f.slice_first(2).unwrap();
        assert_eq!(s2, e(g, &[1]).scale(c(-0.5)));
        assert!(f.slice_first(3).unwrap().is_zero());
        assert!(AntiTensor::scalar(g, c(1.0)).slice_first(1).is_err());
    }

    #[test]
    fn slice_agrees_with_pointwise_values() {
        let mut rng = rng_for(11, 0);
        let g = TimeGrid::new(4, 0.7).unwrap();
        let f = random_tensor(&mut rng, g, 3);
        for k in 1..=4 {
            let s = f.slice_first(k).unwrap();
            for a in 1..=4 {
                for b in 1..=4 {
                    let lhs = s.value_at(&[a, b]).unwrap();
                    let rhs = f.value_at(&[k, a, b]).unwrap();
                    assert!((lhs - rhs).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn restrict_keeps_subsets() {
        let g = grid(3);
        let f = e(g, &[1, 2]).add(&e(g, &[1, 3])).unwrap();
        assert_eq!(f.restrict(set(&[1, 2])), e(g, &[1, 2]));
        assert!(f.restrict(set(&[1])).is_zero());
    }

    #[test]
    fn dense_size_guard() {
        let g = grid(64);
        assert!(DenseAntiFn::zeros(g, 5).is_err());
    }
}
