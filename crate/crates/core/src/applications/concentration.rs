//! Tail bounds for self-adjoint elements from the function
//! `h(s) = Δ Σ_k ‖𝒟_kF‖_∞·‖e^{-sF}𝒟_k(e^{sF})‖_∞`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::lambert::lambert_w;
use crate::chaos::CliffordElement;
use crate::error::{Error, Result};
use crate::malliavin::derivative_at;
use crate::oracle::{matmul, MatrixOracle, Spectrum};
use crate::par::Execution;

/// `s_max·‖F‖_∞` never exceeds this while searching for `h(s_max) ≥ x_max`.
const MAX_EXPONENT: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationOptions {
    /// Largest `x`; defaults to `λ_max - m(F)`.
    pub x_max: Option<f64>,
    pub x_steps: usize,
    pub s_steps: usize,
    /// Right end of the `s`-grid; searched by doubling when absent.
    pub s_max: Option<f64>,
    pub execution: Execution,
}

impl Default for ConcentrationOptions {
    fn default() -> Self {
        ConcentrationOptions { x_max: None, x_steps: 20, s_steps: 400, s_max: None, execution: Execution::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    HypothesisFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPoint {
    pub x: f64,
    /// `m(E([m(F) + x, ∞)))`.
    pub exact_tail: f64,
    /// `exp(-∫_0^x h⁻¹)`; absent when `h` never reaches `x` on the grid or the
    /// monotonicity check failed.
    pub bound: Option<f64>,
    /// `exp(-(x/2‖F‖)(W(x/A) - 1 + 1/W(x/A)))`.
    pub lambert_bound: Option<f64>,
    /// The same with the constant `A/(2‖F‖)` that integrating `k⁻¹` from 0 produces.
    pub lambert_bound_integrated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub mean: f64,
    pub sup_norm: f64,
    /// `A = Δ Σ_k ‖𝒟_kF‖²_∞ / (2‖F‖_∞)`.
    pub a: f64,
    pub x_max: f64,
    pub s_max: f64,
    pub s_grid: Vec<f64>,
    pub h: Vec<f64>,
    pub verdict: Verdict,
    /// Largest change in `∫_0^x h⁻¹` when every other `s` node is dropped.
    pub interpolation_error: f64,
    pub points: Vec<TailPoint>,
}

/// `h` for one element, with the eigendecomposition of `F` cached.
pub struct HFunction<'a> {
    oracle: &'a MatrixOracle,
    f: CliffordElement,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
    eigenvectors_adj: DMatrix<Complex64>,
    /// `V†Ω`.
    vacuum_coords: DVector<Complex64>,
    /// `(k, ‖𝒟_kF‖_∞)` for slots with nonzero derivative.
    slot_norms: Vec<(usize, f64)>,
    spectrum: Spectrum,
    sup_norm: f64,
}

impl<'a> HFunction<'a> {
    pub fn new(f: &CliffordElement, oracle: &'a MatrixOracle) -> Result<Self> {
        if !f.is_self_adjoint(1e-12) {
            return Err(Error::NotSelfAdjoint(f.distance(&f.adjoint())?));
        }
        let m = oracle.to_matrix(f)?;
        let spectrum = m.spectral()?;
        let (eigenvalues, eigenvectors) = m.hermitian_eigenpairs()?;
        let eigenvectors_adj = eigenvectors.adjoint();
        let vacuum_coords = eigenvectors_adj.column(0).into_owned();
        let sup_norm = eigenvalues.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
        let mut slot_norms = Vec::new();
        for k in 1..=f.grid().slots() {
            let dk = derivative_at(f, k)?;
            if dk.terms().next().is_some() {
                let n = oracle.to_matrix_with(&dk, Execution::Sequential)?.operator_norm();
                if n > 0.0 {
                    slot_norms.push((k, n));
                }
            }
        }
        Ok(HFunction {
            oracle,
            f: f.clone(),
            eigenvalues,
            eigenvectors,
            eigenvectors_adj,
            vacuum_coords,
            slot_norms,
            spectrum,
            sup_norm,
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `A = Δ Σ_k ‖𝒟_kF‖²_∞ / (2‖F‖_∞)`.
    pub fn a_constant(&self) -> f64 {
        let sum: f64 = self.slot_norms.iter().map(|(_, n)| n * n).sum();
        self.f.grid().width() * sum / (2.0 * self.sup_norm)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let grid = self.f.grid();
        // e^{sF}Ω = V·(e^{sλ} ∘ V†Ω), pulled back to a chaos expansion
        let coords = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().zip(self.vacuum_coords.iter()).map(|(l, c)| c * (s * l).exp()),
        );
        let v = &self.eigenvectors * coords;
        let v: Vec<Complex64> = v.iter().copied().collect();
        let g = self.oracle.from_vacuum_vector(&v)?;
        let mut total = 0.0;
        for &(k, dnorm) in &self.slot_norms {
            let dg = derivative_at(&g, k)?;
            let dm = self.oracle.to_matrix_with(&dg, Execution::Sequential)?;
            // ‖e^{-sF}·D‖ = ‖diag(e^{-sλ})·V†·D‖
            let mut x = matmul(&self.eigenvectors_adj, dm.matrix());
            for (i, mut row) in x.row_iter_mut().enumerate() {
                row *= Complex64::new((-s * self.eigenvalues[i]).exp(), 0.0);
            }
            let gram = matmul(&x, &x.adjoint());
            let top = gram.symmetric_eigenvalues().iter().fold(0.0f64, |m, &e| m.max(e));
            total += dnorm * top.max(0.0).sqrt();
        }
        Ok(grid.width() * total)
    }
}

/// `h(s)` for one `s`.
pub fn h_function(f: &CliffordElement, oracle: &MatrixOracle, s: f64) -> Result<f64> {
    HFunction::new(f, oracle)?.eval(s)
}

/// `∫_0^x h⁻¹` for piecewise-linear `h` through `(s_i, h_i)`, by the
/// trapezoid rule on the inverse; `None` when `h` stays below `x`.
fn integrate_inverse(s: &[f64], h: &[f64], x: f64) -> Option<f64> {
    if x <= 0.0 {
        return Some(0.0);
    }
    let i = h.iter().position(|&v| v >= x)?;
    if i == 0 {
        return Some(0.0);
    }
    let mut acc = 0.0;
    for j in 0..i - 1 {
        acc += (h[j + 1] - h[j]) * (s[j] + s[j + 1]) / 2.0;
    }
    let (h0, h1, s0, s1) = (h[i - 1], h[i], s[i - 1], s[i]);
    let s_star = if h1 > h0 { s0 + (x - h0) / (h1 - h0) * (s1 - s0) } else { s1 };
    acc += (x - h0) * (s0 + s_star) / 2.0;
    Some(acc)
}

pub fn concentration_tail(
    f: &CliffordElement,
    oracle: &MatrixOracle,
    opts: &ConcentrationOptions,
) -> Result<ConcentrationReport> {
    if opts.s_steps < 2 {
        return Err(Error::InvalidInput("need at least 2 s-steps".into()));
    }
    let hf = HFunction::new(f, oracle)?;
    let mean = f.state().re;
    let sup_norm = hf.sup_norm();
    let spread = hf.spectrum().max_value() - mean;
    let x_max = opts.x_max.unwrap_or(if spread > 1e-12 { spread } else { 1.0 });
    if !(x_max.is_finite() && x_max >= 0.0) {
        return Err(Error::InvalidInput(format!("x_max must be finite and non-negative, got {x_max}")));
    }
    let s_limit = MAX_EXPONENT / sup_norm.max(1e-12);
    let s_max = match opts.s_max {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => return Err(Error::InvalidInput(format!("s_max must be positive, got {s}"))),
        None => {
            let mut s = (1.0 / sup_norm.max(1e-12)).min(s_limit);
            while s < s_limit && hf.eval(s)? < x_max {
                s = (2.0 * s).min(s_limit);
            }
            s
        }
    };
    let s_grid: Vec<f64> = (0..=opts.s_steps).map(|i| s_max * i as f64 / opts.s_steps as f64).collect();
    let h = opts.execution.map_slice(&s_grid, |&s| hf.eval(s)).into_iter().collect::<Result<Vec<_>>>()?;
    let monotone = h.windows(2).all(|w| w[1] >= w[0] - 1e-12 * (1.0 + w[0].abs()));
    let verdict = if monotone { Verdict::Verified } else { Verdict::HypothesisFailed };

    let a = if sup_norm > 0.0 { hf.a_constant() } else { 0.0 };
    let coarse_s: Vec<f64> = s_grid.iter().step_by(2).copied().collect();
    let coarse_h: Vec<f64> = h.iter().step_by(2).copied().collect();
    let mut interpolation_error: f64 = 0.0;
    let x_steps = opts.x_steps.max(1);
    let points = (0..x_steps)
        .map(|j| {
            let x = if x_steps == 1 { 0.0 } else { x_max * j as f64 / (x_steps - 1) as f64 };
            let exact_tail = hf.spectrum().tail(mean + x);
            let integral = if monotone { integrate_inverse(&s_grid, &h, x) } else { None };
            if let (Some(fine), Some(coarse)) = (integral, integrate_inverse(&coarse_s, &coarse_h, x)) {
                interpolation_error = interpolation_error.max((fine - coarse).abs());
            }
            let (lambert_bound, lambert_bound_integrated) = if monotone && a > 0.0 {
                let w = lambert_w(x / a).expect("x/A ≥ 0");
                // x/W(x/A) = A·e^W keeps the x → 0 limit finite
                let exponent = (x * w - x + a * w.exp()) / (2.0 * sup_norm);
                let offset = a / (2.0 * sup_norm);
                (Some((-exponent).exp()), Some((offset - exponent).exp()))
            } else {
                (None, None)
            };
            TailPoint { x, exact_tail, bound: integral.map(|v| (-v).exp()), lambert_bound, lambert_bound_integrated }
        })
        .collect();

    Ok(ConcentrationReport {
        mean,
        sup_norm,
        a,
        x_max,
        s_max,
        s_grid,
        h,
        verdict,
        interpolation_error,
        points,
    })
}
