//! Randomized verification suites.
//!
//! Every check draws its cases from `rng_for(seed, stream)` with a stream
//! private to the check, runs them through `Execution::map`, and folds the
//! residuals in case order. Reports are therefore identical for a given
//! configuration whatever the execution policy.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::antisym::{binomial, contract_hat_dense, factorial, AntiTensor};
use crate::applications::{
    antisymmetric_norm_check, characteristic_distance, claim1_report, claim2_witness, concentration_tail,
    entropy_closed_form, fourth_moment, h_function, lambert_w, log_sobolev_check, two_point_fn,
    variance_carre, ConcentrationOptions, Verdict,
};
use crate::chaos::CliffordElement;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::ito::{check_adapted, clark_ocone, increment, ito_integral, martingale_projection, AdaptedProcess};
use crate::malliavin::{
    carre_norm, derivative, derivative_at, divergence, inv_number, number_operator, ProcessElement,
};
use crate::oracle::{dimension_cap, MatrixOracle};
use crate::par::Execution;
use crate::random::{
    random_adapted_process, random_element, random_process, random_self_adjoint_element,
    random_self_adjoint_tensor, random_subset, random_tensor, random_unit_vector, rng_for, CaseRng,
};
use crate::report::Report;
use crate::slots::SlotSet;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Two candidate formulas closer than this on a case are not compared there.
const SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Malliavin,
    Ito,
    Oracle,
    Applications,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Algebra, Suite::Malliavin, Suite::Ito, Suite::Oracle, Suite::Applications];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Malliavin => "malliavin",
            Suite::Ito => "ito",
            Suite::Oracle => "oracle",
            Suite::Applications => "applications",
        }
    }

    pub fn checks(self) -> &'static [(&'static str, CheckFn)] {
        match self {
            Suite::Algebra => &[
                ("product_formula", product_formula),
                ("identities", algebra_identities),
            ],
            Suite::Malliavin => &[
                ("adjointness", malliavin_adjointness),
                ("car", derivative_divergence_car),
                ("leibniz", graded_leibniz),
                ("integration_by_parts", integration_by_parts),
                ("structure", derivative_structure),
            ],
            Suite::Ito => &[
                ("clark_ocone", clark_ocone_reconstruction),
                ("coincidence", ito_coincidence),
                ("structure", ito_structure),
            ],
            Suite::Oracle => &[
                ("homomorphism", oracle_homomorphism),
                ("car", oracle_car),
                ("state", oracle_state),
            ],
            Suite::Applications => &[
                ("antisymmetric_norm", antisymmetric_norm),
                ("fourth_moment", fourth_moment_check),
                ("claim2", claim2_check),
                ("claim1", claim1_check),
                ("concentration", concentration_check),
                ("log_sobolev", log_sobolev),
                ("two_point", two_point_check),
                ("characteristic", characteristic_check),
                ("lambert", lambert_check),
            ],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s:?}")))
    }
}

pub type CheckFn = fn(&SuiteConfig) -> Result<Report>;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub slots: usize,
    pub width: f64,
    pub seed: u64,
    /// Base residual tolerance. Checks with their own tolerance scale it by
    /// `tol / DEFAULT_TOL`.
    pub tol: f64,
    pub suites: Vec<Suite>,
    /// Overrides every check's case count.
    pub cases: Option<usize>,
    pub execution: Execution,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            slots: 6,
            width: 1.0,
            seed: 42,
            tol: DEFAULT_TOL,
            suites: Suite::ALL.to_vec(),
            cases: None,
            execution: Execution::default(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        TimeGrid::new(self.slots, self.width)?;
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.cases == Some(0) {
            return Err(Error::InvalidInput("case count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.slots, self.width)
    }

    /// The grid shrunk to at most `max` slots.
    fn grid_at_most(&self, max: usize) -> Result<TimeGrid> {
        TimeGrid::new(self.slots.min(max), self.width)
    }

    fn oracle_grid(&self) -> Result<TimeGrid> {
        self.grid_at_most(dimension_cap())
    }

    fn cases(&self, default: usize) -> usize {
        self.cases.unwrap_or(default)
    }

    fn tol(&self, stated: f64) -> f64 {
        stated * self.tol / DEFAULT_TOL
    }

    fn rng(&self, stream: u64, case: usize) -> CaseRng {
        rng_for(self.seed, (stream << 32) | case as u64)
    }

    fn inputs(&self, report: &mut Report) {
        report
            .input("slots", self.slots)
            .input("width", self.width)
            .input("seed", self.seed)
            .input("tol", self.tol)
            .input("suites", &self.suites)
            .input("cases", self.cases);
    }
}

/// Runs the selected suites in a fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new("verify").with_grid(cfg.grid()?);
    cfg.inputs(&mut report);
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    for suite in suites {
        for (name, check) in suite.checks() {
            report.absorb(&format!("{suite}.{name}"), check(cfg)?);
        }
    }
    Ok(report)
}

/// Runs `f` on cases `0..n` and returns the results in case order.
fn sweep<R: Send>(cfg: &SuiteConfig, n: usize, f: impl Fn(usize) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
    cfg.execution.map(n, f).into_iter().collect()
}

/// Largest value, floored at 0; NaN propagates.
fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) + 0.0 })
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.min(v) })
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn elem(f: &AntiTensor) -> CliffordElement {
    CliffordElement::from_tensor(f.clone())
}

// ---- algebra ----

/// `J_p(f)J_q(g)` level by level against `r!C(p,r)C(q,r)·(f ∧̂_r g)` built
/// from the dense contraction.
pub fn product_formula(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(6)?;
    let pairs: Vec<(usize, usize)> = (0..=3).flat_map(|p| (0..=3).map(move |q| (p, q))).collect();
    let n = cfg.cases(3 * pairs.len());
    let residuals = sweep(cfg, n, |i| {
        let (p, q) = pairs[i % pairs.len()];
        let mut rng = cfg.rng(1, i);
        let f = random_tensor(&mut rng, grid, p);
        let g = random_tensor(&mut rng, grid, q);
        let product = elem(&f).multiply_with(&elem(&g), Execution::Sequential)?;
        let mut worst: f64 = 0.0;
        let mut seen = vec![false; grid.slots() + 1];
        for r in 0..=p.min(q) {
            let weight = factorial(r) * binomial(p, r) * binomial(q, r);
            let expected = contract_hat_dense(&f, &g, r)?.scale(c(weight));
            let degree = p + q - 2 * r;
            if degree > grid.slots() {
                worst = worst.max(expected.norm_sqr().sqrt());
                continue;
            }
            seen[degree] = true;
            worst = worst.max(product.level(degree).max_abs_diff(&expected)?);
        }
        for (degree, seen) in seen.iter().enumerate() {
            if !seen {
                worst = worst.max(product.level(degree).norm_sqr().sqrt());
            }
        }
        Ok(worst)
    })?;
    let mut report = Report::new("product_formula");
    report.quantity("cases", n).quantity("slots", grid.slots());
    report.assert_le("max_abs_error", max_of(residuals), cfg.tol(1e-10));
    Ok(report)
}

/// Associativity, trace property, `β` as a *-automorphism, conditional
/// expectation, Parseval, and the field anticommutator.
pub fn algebra_identities(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(6)?;
    let n = cfg.cases(50);
    let exec = Execution::Sequential;
    let rows = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(2, i);
        let f = random_element(&mut rng, grid, 3);
        let g = random_element(&mut rng, grid, 3);
        let h = random_element(&mut rng, grid, 3);
        let fg = f.multiply_with(&g, exec)?;
        let gf = g.multiply_with(&f, exec)?;
        let assoc = fg.multiply_with(&h, exec)?.max_abs_diff(&f.multiply_with(&g.multiply_with(&h, exec)?, exec)?)?;
        let trace = (fg.state() - gf.state()).norm();
        let beta = fg.beta().max_abs_diff(&f.beta().multiply_with(&g.beta(), exec)?)?
            .max(f.adjoint().beta().max_abs_diff(&f.beta().adjoint())?);
        let a2 = random_subset(&mut rng, grid);
        let a1 = SlotSet::from_bits(a2.bits() & random_subset(&mut rng, grid).bits());
        let v = h.cond_expect(a2);
        let module = (f.cond_expect(a2).multiply_with(&v, exec)?.state() - f.multiply_with(&v, exec)?.state()).norm();
        let tower = f.cond_expect(a2).cond_expect(a1).max_abs_diff(&f.cond_expect(a1))?;
        let parseval = (f.l2_inner(&g)? - f.adjoint().multiply_with(&g, exec)?.state()).norm()
            .max((f.norm_sqr() - f.adjoint().multiply_with(&f, exec)?.state().re).abs());
        let mut zs = [random_tensor(&mut rng, grid, 1), random_tensor(&mut rng, grid, 1)];
        for z in &mut zs {
            *z = z.map(|_, w| c(w.re));
        }
        let (p, q) = (CliffordElement::field(&zs[0])?, CliffordElement::field(&zs[1])?);
        let anti = &p.multiply_with(&q, exec)? + &q.multiply_with(&p, exec)?;
        let pairing = zs[0].inner(&zs[1])?.re;
        let car = anti.max_abs_diff(&CliffordElement::scalar(grid, c(2.0 * pairing)))?;
        Ok([assoc, trace, beta, module.max(tower), parseval, car])
    })?;
    let mut report = Report::new("identities");
    report.quantity("cases", n);
    let names = ["associativity", "trace", "beta_automorphism", "conditional_expectation", "parseval", "field_car"];
    for (j, name) in names.iter().enumerate() {
        report.assert_le(*name, max_of(rows.iter().map(|r| r[j])), cfg.tol(1e-10));
    }
    Ok(report)
}

// ---- malliavin ----

/// `⟨𝒟F, u⟩ = ⟨F, δ(u)⟩`.
pub fn malliavin_adjointness(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(8)?;
    let n = cfg.cases(100);
    let residuals = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(3, i);
        let f = random_element(&mut rng, grid, 4);
        let u = random_process(&mut rng, grid, 4);
        let lhs = derivative(&f).inner(&u)?;
        let rhs = f.l2_inner(&divergence(&u))?;
        Ok((lhs - rhs).norm())
    })?;
    let mut report = Report::new("adjointness");
    report.quantity("cases", n);
    report.assert_le("max_abs_error", max_of(residuals), cfg.tol(1e-10));
    Ok(report)
}

/// `𝒟_k δ(h⊗F) + δ(h⊗𝒟_k F) = h(k)·F`, alternating the configured width
/// with `Δ = 0.5`.
pub fn derivative_divergence_car(cfg: &SuiteConfig) -> Result<Report> {
    let slots = cfg.slots.min(6);
    let n = cfg.cases(50);
    let residuals = sweep(cfg, n, |i| {
        let width = if i % 2 == 0 { cfg.width } else { 0.5 };
        let grid = TimeGrid::new(slots, width)?;
        let mut rng = cfg.rng(4, i);
        let h = random_tensor(&mut rng, grid, 1);
        let f = elem(&random_tensor(&mut rng, grid, i % 4));
        let u = ProcessElement::tensor(&h, &f)?;
        let du = divergence(&u);
        let mut worst: f64 = 0.0;
        for k in 1..=slots {
            let dkf = derivative_at(&f, k)?;
            let lhs = derivative_at(&du, k)?.try_add(&divergence(&ProcessElement::tensor(&h, &dkf)?))?;
            let hk = h.coeff(SlotSet::singleton(k)) / width.sqrt();
            worst = worst.max(lhs.max_abs_diff(&f.scale(hk))?);
        }
        Ok(worst)
    })?;
    let mut report = Report::new("car");
    report.quantity("cases", n);
    report.assert_le("max_abs_error", max_of(residuals), cfg.tol(1e-10));
    Ok(report)
}

/// `𝒟_k(FG) = 𝒟_k(F)·G + β(F)·𝒟_k(G)`.
pub fn graded_leibniz(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(6)?;
    let n = cfg.cases(100);
    let exec = Execution::Sequential;
    let residuals = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(5, i);
        let f = random_element(&mut rng, grid, 3);
        let g = random_element(&mut rng, grid, 3);
        let fg = f.multiply_with(&g, exec)?;
        let bf = f.beta();
        let mut worst: f64 = 0.0;
        for k in 1..=grid.slots() {
            let rhs = derivative_at(&f, k)?
                .multiply_with(&g, exec)?
                .try_add(&bf.multiply_with(&derivative_at(&g, k)?, exec)?)?;
            worst = worst.max(derivative_at(&fg, k)?.max_abs_diff(&rhs)?);
        }
        Ok(worst)
    })?;
    let mut report = Report::new("leibniz");
    report.quantity("cases", n);
    report.assert_le("max_abs_error", max_of(residuals), cfg.tol(1e-10));
    Ok(report)
}

/// `m(δ(u)·J_{p+1}(g)) = Δ Σ_k m(β(u_k)·𝒟_k J_{p+1}(g))` for `u` of pure level `p`.
pub fn integration_by_parts(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(6)?;
    let n = cfg.cases(100);
    let exec = Execution::Sequential;
    let residuals = sweep(cfg, n, |i| {
        let p = i % grid.slots().min(4);
        let mut rng = cfg.rng(6, i);
        let slots = (0..grid.slots()).map(|_| elem(&random_tensor(&mut rng, grid, p))).collect();
        let u = ProcessElement::from_components(grid, slots)?;
        let g = elem(&random_tensor(&mut rng, grid, p + 1));
        let lhs = divergence(&u).multiply_with(&g, exec)?.state();
        let mut rhs = Complex64::new(0.0, 0.0);
        for k in 1..=grid.slots() {
            rhs += u.component(k).beta().multiply_with(&derivative_at(&g, k)?, exec)?.state();
        }
        rhs *= grid.width();
        Ok((lhs - rhs).norm())
    })?;
    let mut report = Report::new("integration_by_parts");
    report.quantity("cases", n);
    report.assert_le("max_abs_error", max_of(residuals), cfg.tol(1e-10));
    Ok(report)
}

/// Anticommuting derivatives, commutation with conditional expectation,
/// `R = δ∘𝒟`, `R⁻¹`, and the constant term of `‖𝒟.F‖²`.
pub fn derivative_structure(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(6)?;
    let n = cfg.cases(30);
    let exec = Execution::Sequential;
    let rows = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(7, i);
        let f = random_element(&mut rng, grid, 4);
        let a = random_subset(&mut rng, grid);
        let mut anti: f64 = 0.0;
        let mut cond: f64 = 0.0;
        for j in 1..=grid.slots() {
            let dj = derivative_at(&f, j)?;
            for k in 1..=grid.slots() {
                let dk = derivative_at(&f, k)?;
                let sum = derivative_at(&dk, j)?.try_add(&derivative_at(&dj, k)?)?;
                anti = anti.max(sum.norm());
            }
            let lhs = derivative_at(&f.cond_expect(a), j)?;
            let rhs = if a.contains(j) { dj.cond_expect(a) } else { CliffordElement::zero(grid) };
            cond = cond.max(lhs.max_abs_diff(&rhs)?);
        }
        let rf = number_operator(&f);
        let mut number = rf.max_abs_diff(&divergence(&derivative(&f)))?;
        for (q, level) in f.levels().iter().enumerate() {
            let x = elem(level);
            number = number.max(number_operator(&x).max_abs_diff(&x.scale_real(q as f64))?);
        }
        let centred = f.try_sub(&CliffordElement::scalar(grid, f.state()))?;
        number = number.max(number_operator(&inv_number(&centred)?).max_abs_diff(&centred)?);
        let q = 2 + i % 2;
        let x = elem(&random_self_adjoint_tensor(&mut rng, grid, q));
        let m2 = x.multiply_with(&x, exec)?.state().re;
        let carre = (carre_norm(&x).state() - c(q as f64 * m2)).norm();
        Ok([anti, cond, number, carre])
    })?;
    let mut report = Report::new("structure");
    report.quantity("cases", n);
    for (j, name) in ["anticommuting", "conditional_commutation", "number_operator", "carre_constant"].iter().enumerate() {
        report.assert_le(*name, max_of(rows.iter().map(|r| r[j])), cfg.tol(1e-10));
    }
    Ok(report)
}

// ---- ito ----

/// `F = m(F) + ∫dΨ·u` with an adapted integrand.
pub fn clark_ocone_reconstruction(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(8)?;
    let n = cfg.cases(100);
    let rows = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(8, i);
        let f = random_element(&mut rng, grid, 4);
        let co = clark_ocone(&f);
        let adapted = check_adapted(co.integrand.process());
        Ok((f.distance(&co.reconstruct())?, if adapted { 0.0 } else { 1.0 }))
    })?;
    let mut report = Report::new("clark_ocone");
    report.quantity("cases", n);
    report.assert_le("max_residual", max_of(rows.iter().map(|r| r.0)), cfg.tol(1e-10));
    report.assert_le("non_adapted_integrands", rows.iter().map(|r| r.1).sum(), 0.0);
    Ok(report)
}

/// `δ(u)` against the left Itô sum, the isometry, and orthogonal increments.
pub fn ito_coincidence(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(8)?;
    let n = cfg.cases(100);
    let rows = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(9, i);
        let u = random_adapted_process(&mut rng, grid, 3);
        let integral = ito_integral(&AdaptedProcess::new(u.clone())?);
        let coincide = integral.max_abs_diff(&divergence(&u))?;
        let isometry = (integral.norm_sqr() - u.norm_sqr()).abs();
        let pieces = (1..=grid.slots())
            .map(|k| increment(grid, k)?.multiply_with(u.component(k), Execution::Sequential))
            .collect::<Result<Vec<_>>>()?;
        let mut orth: f64 = 0.0;
        for j in 0..pieces.len() {
            for k in j + 1..pieces.len() {
                orth = orth.max(pieces[j].l2_inner(&pieces[k])?.norm());
            }
        }
        Ok([coincide, isometry, orth])
    })?;
    let mut report = Report::new("coincidence");
    report.quantity("cases", n);
    for (j, name) in ["divergence_equals_integral", "isometry", "orthogonal_increments"].iter().enumerate() {
        report.assert_le(*name, max_of(rows.iter().map(|r| r[j])), cfg.tol(1e-10));
    }
    Ok(report)
}

/// `δ(1_A ⊗ F) = Ψ(1_A)·F` for `F` supported off `A`, and the tower
/// property of the martingale projections.
pub fn ito_structure(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(8)?;
    let n = cfg.cases(30);
    let rows = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(10, i);
        let a = random_subset(&mut rng, grid);
        let f = random_element(&mut rng, grid, 3).cond_expect(grid.full().difference(a));
        let ind = grid.indicator_vector(a)?;
        let lhs = divergence(&ProcessElement::tensor(&ind, &f)?);
        let rhs = CliffordElement::field(&ind)?.multiply_with(&f, Execution::Sequential)?;
        let lemma = lhs.max_abs_diff(&rhs)?;
        let g = random_element(&mut rng, grid, 4);
        let mut tower: f64 = 0.0;
        for k2 in 0..=grid.slots() {
            let outer = martingale_projection(&g, k2)?;
            for k1 in 0..=k2 {
                tower = tower.max(martingale_projection(&outer, k1)?.max_abs_diff(&martingale_projection(&g, k1)?)?);
            }
        }
        tower = tower.max(martingale_projection(&g, grid.slots())?.max_abs_diff(&g)?);
        Ok([lemma, tower])
    })?;
    let mut report = Report::new("structure");
    report.quantity("cases", n);
    report.assert_le("divergence_of_indicator", max_of(rows.iter().map(|r| r[0])), cfg.tol(1e-10));
    report.assert_le("martingale_tower", max_of(rows.iter().map(|r| r[1])), cfg.tol(1e-10));
    Ok(report)
}

// ---- oracle ----

/// `M(FG) = M(F)M(G)` and `M(F*) = M(F)†`.
pub fn oracle_homomorphism(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.oracle_grid()?;
    let oracle = MatrixOracle::new(grid)?;
    let n = cfg.cases(200);
    let exec = Execution::Sequential;
    let rows = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(11, i);
        let f = random_element(&mut rng, grid, 3);
        let g = random_element(&mut rng, grid, 3);
        let mf = oracle.to_matrix_with(&f, exec)?;
        let mg = oracle.to_matrix_with(&g, exec)?;
        let product = oracle.to_matrix_with(&f.multiply_with(&g, exec)?, exec)?.max_abs_diff(&mf.multiply_with(&mg, exec)?)?;
        let adjoint = oracle.to_matrix_with(&f.adjoint(), exec)?.max_abs_diff(&mf.adjoint())?;
        Ok([product, adjoint])
    })?;
    let mut report = Report::new("homomorphism");
    report.quantity("cases", n).quantity("slots", grid.slots());
    report.assert_le("product", max_of(rows.iter().map(|r| r[0])), cfg.tol(1e-9));
    report.assert_le("adjoint", max_of(rows.iter().map(|r| r[1])), cfg.tol(1e-9));
    Ok(report)
}

/// `{Ψ_i, Ψ_j} = 2δ_ij·I`, `Ψ_k† = Ψ_k`, `⟨Ω, Ψ_kΩ⟩ = 0`.
pub fn oracle_car(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.oracle_grid()?.slots().min(8);
    let grid = TimeGrid::new(grid, cfg.width)?;
    let oracle = MatrixOracle::new(grid)?;
    let d = grid.slots();
    let fields = (1..=d).map(|k| oracle.field_matrix(k)).collect::<Result<Vec<_>>>()?;
    let id = oracle.identity();
    let mut car: f64 = 0.0;
    let mut hermitian: f64 = 0.0;
    let mut odd: f64 = 0.0;
    for i in 0..d {
        hermitian = hermitian.max(fields[i].self_adjoint_residual());
        odd = odd.max(fields[i].vacuum_expectation().norm());
        for j in 0..d {
            let anti = fields[i].multiply(&fields[j])?.add(&fields[j].multiply(&fields[i])?)?;
            let expected = if i == j { id.scale(c(2.0)) } else { id.scale(c(0.0)) };
            car = car.max(anti.max_abs_diff(&expected)?);
        }
    }
    let mut report = Report::new("car");
    report.quantity("slots", d);
    report.assert_le("anticommutator", car, cfg.tol(1e-12));
    report.assert_le("self_adjoint", hermitian, cfg.tol(1e-12));
    report.assert_le("vacuum_odd_moment", odd, cfg.tol(1e-12));
    Ok(report)
}

/// State, Fock-vector isometry, round trip, traciality and spectral weights.
pub fn oracle_state(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.oracle_grid()?;
    let oracle = MatrixOracle::new(grid)?;
    let n = cfg.cases(100);
    let exec = Execution::Sequential;
    let rows = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(12, i);
        let f = random_element(&mut rng, grid, 4);
        let g = random_element(&mut rng, grid, 4);
        let mf = oracle.to_matrix_with(&f, exec)?;
        let mg = oracle.to_matrix_with(&g, exec)?;
        let state = (mf.vacuum_expectation() - f.state()).norm();
        let isometry = (mf.vacuum_norm() - f.norm()).abs();
        let round_trip = oracle.from_matrix(&mf)?.max_abs_diff(&f)?;
        let trace = (mf.multiply_with(&mg, exec)?.vacuum_expectation() - mg.multiply_with(&mf, exec)?.vacuum_expectation()).norm();
        let s = random_self_adjoint_element(&mut rng, grid, 3);
        let weights = (oracle.to_matrix_with(&s, exec)?.spectral()?.total_weight() - 1.0).abs();
        Ok([state, isometry, round_trip, trace, weights])
    })?;
    let mut report = Report::new("state");
    report.quantity("cases", n);
    for (j, name) in ["vacuum_expectation", "fock_isometry", "round_trip", "trace", "spectral_weights"].iter().enumerate() {
        report.assert_le(*name, max_of(rows.iter().map(|r| r[j])), cfg.tol(1e-10));
    }
    Ok(report)
}

// ---- applications ----

/// `‖f ∧̂_r f‖² = ((1+(-1)^{q+r})/2)·Δ Σ_k ‖f(k,·) ∧̂_r f‖²`; the variant
/// with an extra `1/(q-r)²` must miss.
pub fn antisymmetric_norm(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid()?;
    let degrees: Vec<usize> = [2, 3, 4].into_iter().filter(|&q| q <= grid.slots()).collect();
    let mut report = Report::new("antisymmetric_norm");
    if degrees.is_empty() {
        report.quantity("cases", 0);
        return Ok(report);
    }
    let n = cfg.cases(30);
    let rows = sweep(cfg, n, |i| {
        let q = degrees[i % degrees.len()];
        let mut rng = cfg.rng(13, i);
        let f = random_self_adjoint_tensor(&mut rng, grid, q);
        let mut residual: f64 = 0.0;
        let mut typeset: f64 = 0.0;
        let mut odd: f64 = 0.0;
        let mut gap: f64 = 0.0;
        for r in 0..q {
            let check = antisymmetric_norm_check(&f, r)?;
            residual = residual.max((check.lhs - check.rhs).abs());
            typeset = typeset.max((check.lhs - check.rhs_typeset).abs());
            gap = gap.max((check.rhs - check.rhs_typeset).abs());
            if (q + r) % 2 == 1 {
                odd = odd.max(check.lhs.sqrt());
            }
        }
        Ok([residual, typeset, odd, gap])
    })?;
    // cases where the two right sides coincide (e.g. q = d) cannot tell them apart
    let separating: Vec<f64> = rows.iter().filter(|r| r[3] > SEPARATION).map(|r| r[1]).collect();
    report.quantity("cases", n).quantity("separating_cases", separating.len());
    report.assert_le("max_residual", max_of(rows.iter().map(|r| r[0])), cfg.tol(1e-10));
    report.assert_le("odd_parity_norm", max_of(rows.iter().map(|r| r[2])), cfg.tol(1e-12));
    if !separating.is_empty() {
        report.assert_gt("typeset_factor_min_residual", min_of(separating), cfg.tol(1e-10));
    }
    Ok(report)
}

/// `m(F⁴) = 2m(F²)² + W_0 + K(F)` against the oracle; the typeset `C_0`
/// and the typeset `T_r` must miss.
pub fn fourth_moment_check(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.oracle_grid()?;
    let degrees: Vec<usize> = [2, 3, 4].into_iter().filter(|&q| q <= grid.slots()).collect();
    let mut report = Report::new("fourth_moment");
    if degrees.is_empty() {
        report.quantity("cases", 0);
        return Ok(report);
    }
    let n = cfg.cases(50);
    let rows = sweep(cfg, n, |i| {
        let q = degrees[i % degrees.len()];
        let mut rng = cfg.rng(14, i);
        let f = random_self_adjoint_tensor(&mut rng, grid, q);
        let rep = fourth_moment(&f)?;
        let oracle = rep.oracle_m4.ok_or(Error::InvalidInput("oracle unavailable".into()))?;
        Ok([
            (rep.formula_m4() - oracle).abs(),
            (rep.m4 - oracle).abs(),
            (rep.formula_m4_typeset_c0() - oracle).abs(),
            (rep.formula_m4_typeset_t() - oracle).abs(),
            rep.max_odd_parity_norm(),
            (rep.formula_m4_typeset_t() - rep.formula_m4()).abs(),
        ])
    })?;
    let separating: Vec<f64> = rows.iter().filter(|r| r[5] > SEPARATION).map(|r| r[3]).collect();
    report.quantity("cases", n).quantity("typeset_t_separating_cases", separating.len());
    report.assert_le("formula_vs_oracle", max_of(rows.iter().map(|r| r[0])), cfg.tol(1e-9));
    report.assert_le("chaos_vs_oracle", max_of(rows.iter().map(|r| r[1])), cfg.tol(1e-9));
    report.assert_le("odd_parity_norm", max_of(rows.iter().map(|r| r[4])), cfg.tol(1e-12));
    report.assert_gt("typeset_c0_min_residual", min_of(rows.iter().map(|r| r[2])), cfg.tol(1e-9));
    if !separating.is_empty() {
        report.assert_gt("typeset_t_min_residual", min_of(separating), cfg.tol(1e-9));
    }
    Ok(report)
}

/// `f = e_1∧e_2∧e_3∧e_4` at `d = 4`, plus `K(Ψ(z)) = 0` for random unit `z`.
pub fn claim2_check(cfg: &SuiteConfig) -> Result<Report> {
    let grid = TimeGrid::new(4, cfg.width)?;
    let fs = [1, 2, 3, 4].map(|k| AntiTensor::basis(grid, &[k]).expect("slot in range"));
    let w = claim2_witness(&fs)?;
    let fm = &w.fourth_moment;
    let oracle_m4 = fm.oracle_m4.ok_or(Error::InvalidInput("oracle unavailable".into()))?;
    let oracle_k = oracle_m4 - fm.c0 - fm.w0;
    let mut report = Report::new("claim2");
    report
        .quantity("wedge3_integral", w.wedge3_integral)
        .quantity("wedge3_expected", w.wedge3_expected)
        .quantity("wedge2_norm", w.wedge2_norm)
        .quantity("k", w.k)
        .quantity("oracle_m4", oracle_m4);
    report.assert_le("wedge2_norm", w.wedge2_norm, cfg.tol(1e-12));
    report.assert_le("wedge3_integral_error", (w.wedge3_integral - 1.0 / 2304.0).abs(), cfg.tol(1e-12));
    report.assert_le("wedge3_expected_error", (w.wedge3_expected - 1.0 / 2304.0).abs(), cfg.tol(1e-12));
    report.assert_le("k_error", (w.k + 1.0).abs(), cfg.tol(1e-9));
    report.assert_le("oracle_k_error", (oracle_k + 1.0).abs(), cfg.tol(1e-9));

    let fgrid = cfg.oracle_grid()?;
    let n = cfg.cases(10);
    let ks = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(15, i);
        let z = random_unit_vector(&mut rng, fgrid);
        let rep = fourth_moment(&z)?;
        let m4 = rep.oracle_m4.ok_or(Error::InvalidInput("oracle unavailable".into()))?;
        Ok((m4 - rep.c0 - rep.w0).abs().max(rep.k.abs()))
    })?;
    report.quantity("field_cases", n);
    report.assert_le("field_k", max_of(ks), cfg.tol(1e-10));
    Ok(report)
}

/// Closed-form against direct `Var(‖𝒟.F‖²)`, `⟨𝒟F, 𝒟R⁻¹F⟩ = (1/q)‖𝒟.F‖²`,
/// and degree-4 homogeneity of the variance.
pub fn claim1_check(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.grid_at_most(6)?;
    let degrees: Vec<usize> = [2, 3, 4].into_iter().filter(|&q| q <= grid.slots()).collect();
    let mut report = Report::new("claim1");
    if degrees.is_empty() {
        report.quantity("cases", 0);
        return Ok(report);
    }
    let n = cfg.cases(20);
    let rows = sweep(cfg, n, |i| {
        let q = degrees[i % degrees.len()];
        let mut rng = cfg.rng(16, i);
        let f = random_self_adjoint_tensor(&mut rng, grid, q);
        let rep = claim1_report(&f)?;
        let scale: f64 = rng.random_range(0.5..2.0);
        let scaled = variance_carre(&f.scale(c(scale)))?;
        let homogeneity = (scaled.closed - scale.powi(4) * rep.variance.closed).abs();
        Ok([(rep.variance.closed - rep.variance.direct).abs(), rep.pairing_residual, homogeneity])
    })?;
    report.quantity("cases", n);
    report.assert_le("variance_closed_vs_direct", max_of(rows.iter().map(|r| r[0])), cfg.tol(1e-9));
    report.assert_le("pairing_vs_carre", max_of(rows.iter().map(|r| r[1])), cfg.tol(1e-10));
    report.assert_le("variance_homogeneity", max_of(rows.iter().map(|r| r[2])), cfg.tol(1e-9));
    Ok(report)
}

/// Slot count for concentration case `i`: cycles `2..=max` (or stays at `max`
/// when `max < 2`).
pub fn concentration_slots(max: usize, i: usize) -> usize {
    if max < 2 {
        max
    } else {
        2 + i % (max - 1)
    }
}

/// Exact spectral tail against `exp(-∫h⁻¹)` on random self-adjoint `F`, and
/// the closed form `h(s) = sinh(s)e^s` for `F = Ψ(e_1)`.
pub fn concentration_check(cfg: &SuiteConfig) -> Result<Report> {
    let max_slots = cfg.oracle_grid()?.slots().min(6);
    let n = cfg.cases(20);
    let opts = ConcentrationOptions { execution: Execution::Sequential, ..Default::default() };
    let rows = sweep(cfg, n, |i| {
        let grid = TimeGrid::new(concentration_slots(max_slots, i), cfg.width)?;
        let oracle = MatrixOracle::new(grid)?;
        let mut rng = cfg.rng(17, i);
        let f = random_self_adjoint_element(&mut rng, grid, 3);
        let rep = concentration_tail(&f, &oracle, &opts)?;
        let verified = rep.verdict == Verdict::Verified;
        let violation = if verified {
            max_of(rep.points.iter().map(|p| p.exact_tail - p.bound.unwrap_or(f64::INFINITY)))
        } else {
            0.0
        };
        let covered = rep.points.iter().filter(|p| p.bound.is_some()).count();
        Ok((verified, violation, covered, rep.interpolation_error))
    })?;
    let verified = rows.iter().filter(|r| r.0).count();
    let mut report = Report::new("concentration");
    report
        .quantity("cases", n)
        .quantity("verified", verified)
        .quantity("bounded_points", rows.iter().map(|r| r.2).sum::<usize>())
        .quantity("max_interpolation_error", max_of(rows.iter().map(|r| r.3)));
    report.assert_le("tail_minus_bound", max_of(rows.iter().map(|r| r.1)), cfg.tol(1e-10));

    let grid = TimeGrid::new(max_slots.max(1), cfg.width)?;
    let oracle = MatrixOracle::new(grid)?;
    let psi = CliffordElement::field_basis(grid, 1)?;
    let mut closed: f64 = 0.0;
    for s in [0.0f64, 0.25, 0.5, 1.0, 2.0] {
        closed = closed.max((h_function(&psi, &oracle, s)? - s.sinh() * s.exp()).abs());
    }
    report.assert_le("field_h_closed_form", closed, cfg.tol(1e-8));
    let opts = ConcentrationOptions { x_max: Some(0.5), x_steps: 2, ..opts };
    let rep = concentration_tail(&psi, &oracle, &opts)?;
    let p = rep.points[1];
    report
        .quantity("field_tail", p.exact_tail)
        .quantity("field_bound", p.bound)
        .quantity("field_lambert_bound", p.lambert_bound)
        .quantity("field_lambert_bound_integrated", p.lambert_bound_integrated);
    report.assert_le("field_tail_error", (p.exact_tail - 0.5).abs(), cfg.tol(1e-12));
    report.assert_le("field_tail_minus_bound", p.exact_tail - p.bound.unwrap_or(f64::NAN), cfg.tol(1e-10));
    report.assert_le("field_tail_minus_lambert", p.exact_tail - p.lambert_bound.unwrap_or(f64::NAN), cfg.tol(1e-10));
    Ok(report)
}

/// Entropy of `φ(Ψ_1)²` against `2·log 4·‖𝒟.φ(Ψ_1)‖²`.
pub fn log_sobolev(cfg: &SuiteConfig) -> Result<Report> {
    let n = cfg.cases(50);
    let rows = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(18, i);
        let (phi1, phim1): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let rep = log_sobolev_check(phi1, phim1, cfg.slots)?;
        let quadrature = (rep.entropy - entropy_closed_form(phi1, phim1)).abs();
        let sharp = if rep.entropy > rep.sharp_bound + cfg.tol(1e-10) { 1 } else { 0 };
        Ok((rep.entropy - rep.bound, quadrature, sharp))
    })?;
    let half = log_sobolev_check(1.0, 0.0, cfg.slots)?;
    let flat = log_sobolev_check(0.7, 0.7, cfg.slots)?;
    let mut report = Report::new("log_sobolev");
    report
        .quantity("cases", n)
        .quantity("sharp_bound_violations", rows.iter().map(|r| r.2).sum::<usize>())
        .quantity("indicator", half);
    report.assert_le("entropy_minus_bound", max_of(rows.iter().map(|r| r.0)), cfg.tol(1e-10));
    report.assert_le("quadrature_vs_closed_form", max_of(rows.iter().map(|r| r.1)), cfg.tol(1e-8));
    report.assert_le("indicator_entropy_error", (half.entropy - LN_2 / 2.0).abs(), cfg.tol(1e-8));
    report.assert_le("indicator_energy_error", (half.energy - 0.25).abs(), cfg.tol(1e-12));
    report.assert_le("indicator_entropy_minus_sharp_bound", half.entropy - half.sharp_bound, cfg.tol(1e-10));
    report.assert_le("constant_entropy", flat.entropy.abs().max(flat.bound.abs()), cfg.tol(1e-12));
    Ok(report)
}

/// `φ(Ψ(z))` from two branch values against the matrix functional calculus.
pub fn two_point_check(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.oracle_grid()?;
    let oracle = MatrixOracle::new(grid)?;
    let n = cfg.cases(20);
    let residuals = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(19, i);
        let z = random_unit_vector(&mut rng, grid).scale(c(rng.random_range(0.2..2.0)));
        let (a, b, k): (f64, f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-2.0..2.0));
        let phi = move |x: f64| Complex64::new(a * (k * x).exp(), b * (k * x).sin());
        let chaos = two_point_fn(phi, &z)?;
        let matrix = oracle.to_matrix_with(&CliffordElement::field(&z)?, Execution::Sequential)?.functional_calculus(phi)?;
        oracle.to_matrix_with(&chaos, Execution::Sequential)?.max_abs_diff(&matrix)
    })?;
    let mut report = Report::new("two_point");
    report.quantity("cases", n);
    report.assert_le("max_abs_error", max_of(residuals), cfg.tol(1e-10));
    Ok(report)
}

/// `‖e^{itF} - e^{itΨ(z)}‖ ≤ |t|·‖F - Ψ(z)‖` for centred self-adjoint `F`.
pub fn characteristic_check(cfg: &SuiteConfig) -> Result<Report> {
    let grid = cfg.oracle_grid()?;
    let oracle = MatrixOracle::new(grid)?;
    let n = cfg.cases(20);
    let ts = [0.5, 1.0, 2.0];
    let rows = sweep(cfg, n, |i| {
        let mut rng = cfg.rng(20, i);
        let f = random_self_adjoint_element(&mut rng, grid, 3);
        let f = f.try_sub(&CliffordElement::scalar(grid, f.state()))?;
        let z = random_unit_vector(&mut rng, grid);
        let mut excess = f64::NEG_INFINITY;
        let mut gap: f64 = 0.0;
        for t in ts {
            let cd = characteristic_distance(&f, &z, t, &oracle)?;
            excess = excess.max(cd.lhs - cd.middle);
            gap = gap.max((cd.middle - cd.right).abs());
        }
        Ok((excess, gap))
    })?;
    let mut report = Report::new("characteristic");
    report
        .quantity("cases", n)
        .quantity("t_values", ts)
        .quantity("max_middle_right_gap", max_of(rows.iter().map(|r| r.1)));
    report.assert_le("lhs_minus_middle", max_of(rows.iter().map(|r| r.0)), cfg.tol(1e-10));
    if grid.slots() >= 3 {
        let f = CliffordElement::from_tensor(AntiTensor::basis(grid, &[1, 2])?.scale(Complex64::i()));
        let z = AntiTensor::basis(grid, &[3])?;
        let cd = characteristic_distance(&f, &z, 1.0, &oracle)?;
        let zero = characteristic_distance(&f, &z, 0.0, &oracle)?;
        report.quantity("example", cd);
        report.assert_le("example_lhs_minus_middle", cd.lhs - cd.middle, cfg.tol(1e-10));
        report.assert_le("zero_t", zero.lhs.max(zero.middle).max(zero.right), cfg.tol(1e-12));
    }
    Ok(report)
}

/// `W(y)·e^{W(y)} = y` over a logarithmic sweep.
pub fn lambert_check(cfg: &SuiteConfig) -> Result<Report> {
    let mut worst: f64 = 0.0;
    for j in 0..=60 {
        let y = if j == 0 { 0.0 } else { 10f64.powf(-6.0 + 0.2 * j as f64) };
        let w = lambert_w(y)?;
        worst = worst.max((w * w.exp() - y).abs() / (1.0 + y));
    }
    let mut report = Report::new("lambert");
    report.quantity("w_of_1", lambert_w(1.0)?);
    report.assert_le("relative_residual", worst, cfg.tol(1e-12));
    report.assert_le("w_of_e", (lambert_w(std::f64::consts::E)? - 1.0).abs(), cfg.tol(1e-12));
    Ok(report)
}
