//! Cloning diagrams in symmetric monoidal categories.
//!
//! States of an object `A` are arrows `I -> A`. An (expanded) cloning process
//! for `A` is a blank state `β`, a machine object `B` with ready state `ρ`,
//! and an arrow `c` on `A ⊛ A ⊛ B` with `c ∘ (ψ ⊛ β ⊛ ρ) = ψ ⊛ ψ ⊛ f(ψ)` for
//! every state `ψ`. With `B = I` this is the traditional diagram
//! `c ∘ (ψ ⊛ β) = ψ ⊛ ψ`.
//!
//! Both instances are strict: the unit is literally the zero-dimensional
//! symplectic space or `C` with the 1x1 identity, so `I ⊛ A` and `A`
//! coincide after index reordering is fixed.

use std::fmt::Debug;

use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cloning::{CloningProcess, Verdict};
use crate::error::{Error, Result};
use crate::form::{direct_sum, is_symplectic_map, standard_form, SkewForm};
use crate::matrix::{max_abs_diff, unit_vector, RatMatrix};
use crate::quantum::{kron, ComplexMatrix, ComplexVector, ISOMETRY_TOL};
use crate::rational::{to_f64, Rational};

pub trait SymmetricMonoidal {
    type Object: Clone + Debug + PartialEq;
    type Arrow: Clone + Debug;

    fn unit(&self) -> Self::Object;
    fn tensor_objects(&self, a: &Self::Object, b: &Self::Object) -> Self::Object;
    fn domain(&self, f: &Self::Arrow) -> Self::Object;
    fn codomain(&self, f: &Self::Arrow) -> Self::Object;
    fn identity(&self, a: &Self::Object) -> Self::Arrow;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::Arrow, f: &Self::Arrow) -> Result<Self::Arrow>;
    fn tensor(&self, f: &Self::Arrow, g: &Self::Arrow) -> Self::Arrow;
    /// Whether `f` is a morphism of the category (symplectic, isometric).
    fn is_arrow(&self, f: &Self::Arrow) -> bool;
    fn arrows_equal(&self, f: &Self::Arrow, g: &Self::Arrow) -> bool;
    /// Size of the discrepancy between two parallel arrows, for reporting.
    fn arrow_distance(&self, f: &Self::Arrow, g: &Self::Arrow) -> f64;
    fn states(&self, a: &Self::Object, samples: usize, seed: u64) -> StateSample<Self::Arrow>;
}

#[derive(Clone, Debug)]
pub struct StateSample<A> {
    pub states: Vec<A>,
    /// True when checking these states decides the diagram for linear `c`
    /// and affine `f`.
    pub exhaustive: bool,
}

/// Affine map `x ↦ L x + o` between symplectic spaces. Points of `A` are the
/// arrows from the zero-dimensional space, i.e. `L` is `dim A x 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SympArrow {
    pub domain: SkewForm,
    pub codomain: SkewForm,
    pub linear: RatMatrix,
    pub offset: Vec<Rational>,
}

impl SympArrow {
    pub fn linear(domain: SkewForm, codomain: SkewForm, linear: RatMatrix) -> Result<Self> {
        if linear.rows() != codomain.dim() || linear.cols() != domain.dim() {
            return Err(Error::IllFormed(format!(
                "linear part {}x{} does not map dim {} to dim {}",
                linear.rows(),
                linear.cols(),
                domain.dim(),
                codomain.dim()
            )));
        }
        let offset = vec![Rational::zero(); codomain.dim()];
        Ok(Self {
            domain,
            codomain,
            linear,
            offset,
        })
    }

    pub fn point(space: &SkewForm, x: Vec<Rational>) -> Self {
        assert_eq!(x.len(), space.dim());
        Self {
            domain: standard_form(0),
            codomain: space.clone(),
            linear: RatMatrix::zeros(space.dim(), 0),
            offset: x,
        }
    }
}

/// Linear symplectic spaces with affine symplectic maps.
#[derive(Clone, Copy, Debug, Default)]
pub struct SymplecticInstance;

impl SymmetricMonoidal for SymplecticInstance {
    type Object = SkewForm;
    type Arrow = SympArrow;

    fn unit(&self) -> SkewForm {
        standard_form(0)
    }

    fn tensor_objects(&self, a: &SkewForm, b: &SkewForm) -> SkewForm {
        direct_sum(a, b)
    }

    fn domain(&self, f: &SympArrow) -> SkewForm {
        f.domain.clone()
    }

    fn codomain(&self, f: &SympArrow) -> SkewForm {
        f.codomain.clone()
    }

    fn identity(&self, a: &SkewForm) -> SympArrow {
        SympArrow::linear(a.clone(), a.clone(), RatMatrix::identity(a.dim())).expect("square identity")
    }

    fn compose(&self, g: &SympArrow, f: &SympArrow) -> Result<SympArrow> {
        if f.codomain != g.domain {
            return Err(Error::IllFormed("codomain of f is not the domain of g".to_string()));
        }
        let linear = g.linear.mul(&f.linear)?;
        let offset = g
            .linear
            .mul_vec(&f.offset)?
            .into_iter()
            .zip(&g.offset)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SympArrow {
            domain: f.domain.clone(),
            codomain: g.codomain.clone(),
            linear,
            offset,
        })
    }

    fn tensor(&self, f: &SympArrow, g: &SympArrow) -> SympArrow {
        SympArrow {
            domain: direct_sum(&f.domain, &g.domain),
            codomain: direct_sum(&f.codomain, &g.codomain),
            linear: RatMatrix::block_diag(&[&f.linear, &g.linear]),
            offset: f.offset.iter().chain(&g.offset).cloned().collect(),
        }
    }

    fn is_arrow(&self, f: &SympArrow) -> bool {
        is_symplectic_map(&f.linear, &f.domain, &f.codomain).unwrap_or(false)
    }

    fn arrows_equal(&self, f: &SympArrow, g: &SympArrow) -> bool {
        f == g
    }

    fn arrow_distance(&self, f: &SympArrow, g: &SympArrow) -> f64 {
        if f.domain != g.domain || f.codomain != g.codomain {
            return f64::INFINITY;
        }
        let linear = f.linear.sub(&g.linear).map(|d| d.max_abs()).unwrap_or_default();
        let offset = max_abs_diff(&f.offset, &g.offset);
        to_f64(&linear.max(offset))
    }

    /// Zero and the basis vectors. For linear `c` and affine `f` these decide
    /// the diagram, so the sample size is ignored.
    fn states(&self, a: &SkewForm, _samples: usize, _seed: u64) -> StateSample<SympArrow> {
        let n = a.dim();
        let mut states = vec![SympArrow::point(a, vec![Rational::zero(); n])];
        states.extend((0..n).map(|i| SympArrow::point(a, unit_vector(n, i))));
        StateSample {
            states,
            exhaustive: true,
        }
    }
}

impl SymplecticInstance {
    /// The diagram of a classical process: `β = b`, `ρ = r`, `c = φ` and
    /// `f(x) = F x + f(0)` with `f(0)` read off `φ(0, b, r)`.
    pub fn diagram_from_process(&self, c: &CloningProcess) -> Result<CloningDiagram<'static, Self>> {
        let object = c.object_form().clone();
        let machine = c.machine_form().clone();
        let total = c.total_form();
        let arrow = SympArrow::linear(total.clone(), total, c.phi().clone())?;
        let zero = vec![Rational::zero(); c.object_dim()];
        let base = c.phi().mul_vec(&c.input_state(&zero))?;
        let f0: Vec<Rational> = base[2 * c.object_dim()..].to_vec();
        let readout = c.readout().clone();
        let machine_for_f = machine.clone();
        Ok(CloningDiagram {
            object: object.clone(),
            beta: SympArrow::point(&object, c.blank().to_vec()),
            machine: Some((machine.clone(), SympArrow::point(&machine, c.ready().to_vec()))),
            c: arrow,
            readout: Box::new(move |psi: &SympArrow| {
                let fx: Vec<Rational> = readout
                    .mul_vec(&psi.offset)
                    .expect("state lives in the object space")
                    .into_iter()
                    .zip(&f0)
                    .map(|(a, b)| a + b)
                    .collect();
                SympArrow::point(&machine_for_f, fx)
            }),
        })
    }
}

/// Finite-dimensional Hilbert space, identified by its dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertSpace(pub usize);

/// Finite-dimensional Hilbert spaces with linear isometries. Arrows are
/// `codomain x domain` matrices; tensor is the Kronecker product.
#[derive(Clone, Copy, Debug)]
pub struct HilbertInstance {
    pub tol: f64,
}

impl Default for HilbertInstance {
    fn default() -> Self {
        Self { tol: ISOMETRY_TOL }
    }
}

impl SymmetricMonoidal for HilbertInstance {
    type Object = HilbertSpace;
    type Arrow = ComplexMatrix;

    fn unit(&self) -> HilbertSpace {
        HilbertSpace(1)
    }

    fn tensor_objects(&self, a: &HilbertSpace, b: &HilbertSpace) -> HilbertSpace {
        HilbertSpace(a.0 * b.0)
    }

    fn domain(&self, f: &ComplexMatrix) -> HilbertSpace {
        HilbertSpace(f.cols())
    }

    fn codomain(&self, f: &ComplexMatrix) -> HilbertSpace {
        HilbertSpace(f.rows())
    }

    fn identity(&self, a: &HilbertSpace) -> ComplexMatrix {
        ComplexMatrix::identity(a.0)
    }

    fn compose(&self, g: &ComplexMatrix, f: &ComplexMatrix) -> Result<ComplexMatrix> {
        if f.rows() != g.cols() {
            return Err(Error::IllFormed("codomain of f is not the domain of g".to_string()));
        }
        g.mul(f)
    }

    fn tensor(&self, f: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
        kron(f, g)
    }

    fn is_arrow(&self, f: &ComplexMatrix) -> bool {
        f.is_isometry(self.tol)
    }

    fn arrows_equal(&self, f: &ComplexMatrix, g: &ComplexMatrix) -> bool {
        f.max_abs_diff(g) <= self.tol
    }

    /// Frobenius distance; for states this is the vector distance.
    fn arrow_distance(&self, f: &ComplexMatrix, g: &ComplexMatrix) -> f64 {
        if f.rows() != g.rows() || f.cols() != g.cols() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..f.rows() {
            for j in 0..f.cols() {
                acc += (f.get(i, j) - g.get(i, j)).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Basis states, the equal superpositions `(|0⟩ + |i⟩)/√2`, then seeded
    /// random unit vectors until `samples` states are collected. Never
    /// exhaustive: the unit sphere is not spanned by finitely many checks.
    fn states(&self, a: &HilbertSpace, samples: usize, seed: u64) -> StateSample<ComplexMatrix> {
        let d = a.0;
        let mut vectors: Vec<ComplexVector> = (0..d).map(|i| ComplexVector::basis(d, i)).collect();
        for i in 1..d {
            let mut e = vec![Complex64::new(0.0, 0.0); d];
            e[0] = Complex64::new(1.0, 0.0);
            e[i] = Complex64::new(1.0, 0.0);
            vectors.push(ComplexVector::new(e).normalized());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while vectors.len() < samples {
            vectors.push(ComplexVector::random_unit(d, &mut rng));
        }
        StateSample {
            states: vectors.iter().map(ComplexVector::as_column).collect(),
            exhaustive: false,
        }
    }
}

impl HilbertInstance {
    /// Readout choosing, for each `ψ`, the unit machine state closest to
    /// what `c` actually produces alongside `ψ ⊗ ψ`.
    pub fn best_match_readout(
        c: ComplexMatrix,
        beta: ComplexVector,
        rho: ComplexVector,
    ) -> impl Fn(&ComplexMatrix) -> ComplexMatrix {
        move |psi: &ComplexMatrix| {
            let psi = psi.column(0);
            let d = psi.dim();
            let kd = rho.dim();
            let out = c
                .apply(&psi.kron(&beta).kron(&rho))
                .expect("shapes checked by the diagram");
            let kappa: Vec<Complex64> = (0..kd)
                .map(|l| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..d {
                        for j in 0..d {
                            acc += (psi.entries()[i] * psi.entries()[j]).conj() * out.entries()[(i * d + j) * kd + l];
                        }
                    }
                    acc
                })
                .collect();
            let kappa = ComplexVector::new(kappa);
            if kappa.norm() < 1e-12 {
                rho.as_column()
            } else {
                kappa.normalized().as_column()
            }
        }
    }
}

/// The readout `f`, sending a state of the object to a state of the machine.
pub type Readout<'a, A> = Box<dyn Fn(&A) -> A + 'a>;

/// The data of an expanded cloning diagram. `machine = None` means `B = I`
/// with `ρ = id_I` and `f(ψ) = id_I`, the traditional diagram.
pub struct CloningDiagram<'a, C: SymmetricMonoidal> {
    pub object: C::Object,
    pub beta: C::Arrow,
    pub machine: Option<(C::Object, C::Arrow)>,
    pub c: C::Arrow,
    pub readout: Readout<'a, C::Arrow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateCheck {
    pub index: usize,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramReport {
    /// Whether `c` is a morphism of the category.
    pub arrow_valid: bool,
    pub checks: Vec<StateCheck>,
    pub first_failure: Option<usize>,
    pub exhaustive: bool,
    pub note: String,
    pub verdict: Verdict,
}

fn ensure_state<C: SymmetricMonoidal>(inst: &C, s: &C::Arrow, target: &C::Object, what: &str) -> Result<()> {
    if inst.domain(s) != inst.unit() || &inst.codomain(s) != target {
        return Err(Error::IllFormed(format!(
            "{what} is not a state of the expected object"
        )));
    }
    Ok(())
}

fn summarize(arrow_valid: bool, checks: Vec<StateCheck>, exhaustive: bool) -> DiagramReport {
    let first_failure = checks.iter().find(|c| !c.passed).map(|c| c.index);
    let note = if exhaustive {
        "states checked: zero and basis; exhaustive for linear c with affine f".to_string()
    } else {
        "sampled states only: a pass is evidence, not proof".to_string()
    };
    let mut reasons = Vec::new();
    if !arrow_valid {
        reasons.push("c is not an arrow of the category".to_string());
    }
    if let Some(i) = first_failure {
        reasons.push(format!(
            "diagram does not commute at state {i} (residual {})",
            checks[i].residual
        ));
    }
    let verdict = if reasons.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail(reasons.join("; "))
    };
    DiagramReport {
        arrow_valid,
        checks,
        first_failure,
        exhaustive,
        note,
        verdict,
    }
}

/// Tests `c ∘ (ψ ⊛ β ⊛ ρ) = ψ ⊛ ψ ⊛ f(ψ)` on each given state.
pub fn check_cloning_diagram<C: SymmetricMonoidal>(
    inst: &C,
    diagram: &CloningDiagram<'_, C>,
    states: &StateSample<C::Arrow>,
) -> Result<DiagramReport> {
    let a = &diagram.object;
    let unit = inst.unit();
    let (b, rho) = match &diagram.machine {
        Some((b, rho)) => (b.clone(), rho.clone()),
        None => (unit.clone(), inst.identity(&unit)),
    };
    ensure_state(inst, &diagram.beta, a, "beta")?;
    ensure_state(inst, &rho, &b, "rho")?;
    let aab = inst.tensor_objects(&inst.tensor_objects(a, a), &b);
    if inst.domain(&diagram.c) != aab || inst.codomain(&diagram.c) != aab {
        return Err(Error::IllFormed("c is not an endomorphism of A ⊛ A ⊛ B".to_string()));
    }
    let arrow_valid = inst.is_arrow(&diagram.c);
    let mut checks = Vec::with_capacity(states.states.len());
    for (index, psi) in states.states.iter().enumerate() {
        ensure_state(inst, psi, a, "sampled state")?;
        let prepared = inst.tensor(&inst.tensor(psi, &diagram.beta), &rho);
        let lhs = inst.compose(&diagram.c, &prepared)?;
        let f_psi = match diagram.machine {
            Some(_) => (diagram.readout)(psi),
            None => inst.identity(&unit),
        };
        ensure_state(inst, &f_psi, &b, "f(psi)")?;
        let rhs = inst.tensor(&inst.tensor(psi, psi), &f_psi);
        checks.push(StateCheck {
            index,
            passed: inst.arrows_equal(&lhs, &rhs),
            residual: inst.arrow_distance(&lhs, &rhs),
        });
    }
    Ok(summarize(arrow_valid, checks, states.exhaustive))
}

/// The traditional diagram `c ∘ (ψ ⊛ β) = ψ ⊛ ψ`, coded without a machine.
pub fn check_traditional_diagram<C: SymmetricMonoidal>(
    inst: &C,
    object: &C::Object,
    beta: &C::Arrow,
    c: &C::Arrow,
    states: &StateSample<C::Arrow>,
) -> Result<DiagramReport> {
    ensure_state(inst, beta, object, "beta")?;
    let aa = inst.tensor_objects(object, object);
    if inst.domain(c) != aa || inst.codomain(c) != aa {
        return Err(Error::IllFormed("c is not an endomorphism of A ⊛ A".to_string()));
    }
    let arrow_valid = inst.is_arrow(c);
    let mut checks = Vec::with_capacity(states.states.len());
    for (index, psi) in states.states.iter().enumerate() {
        ensure_state(inst, psi, object, "sampled state")?;
        let lhs = inst.compose(c, &inst.tensor(psi, beta))?;
        let rhs = inst.tensor(psi, psi);
        checks.push(StateCheck {
            index,
            passed: inst.arrows_equal(&lhs, &rhs),
            residual: inst.arrow_distance(&lhs, &rhs),
        });
    }
    Ok(summarize(arrow_valid, checks, states.exhaustive))
}
