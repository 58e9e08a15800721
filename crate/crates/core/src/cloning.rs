//! Classical cloning processes on linear symplectic spaces.
//!
//! A process for `(M, ω)` is a blank state `b ∈ M`, a machine `(N, σ)` with
//! ready state `r ∈ N`, and a linear map `φ` on `M × M × N` that is
//! symplectic for `ξ = ω ⊕ ω ⊕ σ` and sends `(x, b, r)` to `(x, x, f(x))`.
//! The readout `f` is stored as its linear part `F`; the constant part, if
//! any, is recovered from `φ(0, b, r)` during verification.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{shape, Error, Result};
use crate::form::{darboux_basis, direct_sum, direct_sum_all, form_kernel, standard_form, symplectic_defect, SkewForm};
use crate::matrix::{is_zero_vector, unit_vector, RatMatrix};
use crate::rational::{max_abs, serde_string, serde_vec, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CloningProcessFields", into = "CloningProcessFields")]
pub struct CloningProcess {
    object_form: SkewForm,
    blank: Vec<Rational>,
    machine_form: SkewForm,
    ready: Vec<Rational>,
    phi: RatMatrix,
    readout: RatMatrix,
}

#[derive(Serialize, Deserialize)]
struct CloningProcessFields {
    object_form: SkewForm,
    #[serde(with = "serde_vec")]
    blank: Vec<Rational>,
    machine_form: SkewForm,
    #[serde(with = "serde_vec")]
    ready: Vec<Rational>,
    phi: RatMatrix,
    readout: RatMatrix,
}

impl TryFrom<CloningProcessFields> for CloningProcess {
    type Error = Error;
    fn try_from(f: CloningProcessFields) -> Result<Self> {
        CloningProcess::new(f.object_form, f.blank, f.machine_form, f.ready, f.phi, f.readout)
    }
}

impl From<CloningProcess> for CloningProcessFields {
    fn from(c: CloningProcess) -> Self {
        CloningProcessFields {
            object_form: c.object_form,
            blank: c.blank,
            machine_form: c.machine_form,
            ready: c.ready,
            phi: c.phi,
            readout: c.readout,
        }
    }
}

impl CloningProcess {
    /// Checks shapes only; use [`verify_cloning`] to decide whether the
    /// candidate actually clones.
    pub fn new(
        object_form: SkewForm,
        blank: Vec<Rational>,
        machine_form: SkewForm,
        ready: Vec<Rational>,
        phi: RatMatrix,
        readout: RatMatrix,
    ) -> Result<Self> {
        let dm = object_form.dim();
        let dk = machine_form.dim();
        let total = 2 * dm + dk;
        if blank.len() != dm {
            return Err(shape("blank state", format!("length {dm}"), blank.len()));
        }
        if ready.len() != dk {
            return Err(shape("ready state", format!("length {dk}"), ready.len()));
        }
        if phi.rows() != total || phi.cols() != total {
            return Err(shape(
                "phi",
                format!("{total}x{total}"),
                format!("{}x{}", phi.rows(), phi.cols()),
            ));
        }
        if readout.rows() != dk || readout.cols() != dm {
            return Err(shape(
                "readout",
                format!("{dk}x{dm}"),
                format!("{}x{}", readout.rows(), readout.cols()),
            ));
        }
        Ok(Self {
            object_form,
            blank,
            machine_form,
            ready,
            phi,
            readout,
        })
    }

    pub fn object_form(&self) -> &SkewForm {
        &self.object_form
    }

    pub fn blank(&self) -> &[Rational] {
        &self.blank
    }

    pub fn machine_form(&self) -> &SkewForm {
        &self.machine_form
    }

    pub fn ready(&self) -> &[Rational] {
        &self.ready
    }

    pub fn phi(&self) -> &RatMatrix {
        &self.phi
    }

    pub fn readout(&self) -> &RatMatrix {
        &self.readout
    }

    pub fn object_dim(&self) -> usize {
        self.object_form.dim()
    }

    pub fn machine_dim(&self) -> usize {
        self.machine_form.dim()
    }

    /// `ξ = ω ⊕ ω ⊕ σ` on `M × M × N`.
    pub fn total_form(&self) -> SkewForm {
        direct_sum_all(&[&self.object_form, &self.object_form, &self.machine_form])
    }

    /// `(x, b, r)` as one coordinate vector.
    pub fn input_state(&self, x: &[Rational]) -> Vec<Rational> {
        x.iter().chain(&self.blank).chain(&self.ready).cloned().collect()
    }

    /// Returns a copy with `phi` replaced, keeping every other field.
    pub fn with_phi(&self, phi: RatMatrix) -> Result<Self> {
        Self::new(
            self.object_form.clone(),
            self.blank.clone(),
            self.machine_form.clone(),
            self.ready.clone(),
            phi,
            self.readout.clone(),
        )
    }

    pub fn with_readout(&self, readout: RatMatrix) -> Result<Self> {
        Self::new(
            self.object_form.clone(),
            self.blank.clone(),
            self.machine_form.clone(),
            self.ready.clone(),
            self.phi.clone(),
            readout,
        )
    }

    pub fn with_states(&self, blank: Vec<Rational>, ready: Vec<Rational>) -> Result<Self> {
        Self::new(
            self.object_form.clone(),
            blank,
            self.machine_form.clone(),
            ready,
            self.phi.clone(),
            self.readout.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectEntry {
    pub row: usize,
    pub col: usize,
    #[serde(with = "serde_string")]
    pub value: Rational,
}

/// The first state at which `φ(x, b, r) ≠ (x, x, f(x))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CloningFailure {
    /// Index of the basis vector `x = e_i`, or `None` for `x = 0`.
    pub basis_index: Option<usize>,
    pub coordinate: usize,
    #[serde(with = "serde_string")]
    pub residual: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    /// Max-abs entry of `φ^T ξ φ - ξ`.
    #[serde(with = "serde_string")]
    pub symplectic_defect_norm: Rational,
    pub first_defect_entry: Option<DefectEntry>,
    /// Max-abs coordinate of `φ(x, b, r) - (x, x, f(x))` over `x = 0` and the basis.
    #[serde(with = "serde_string")]
    pub cloning_residual: Rational,
    pub first_cloning_failure: Option<CloningFailure>,
    /// Max-abs entry of `F^T σ F + ω`.
    #[serde(with = "serde_string")]
    pub readout_defect_norm: Rational,
    /// The object-to-machine block of `φ`, i.e. the linear part of `f` that `φ` implies.
    pub inferred_readout: RatMatrix,
    /// Machine component of `φ(0, b, r)`, i.e. `f(0)`.
    #[serde(with = "serde_vec")]
    pub inferred_offset: Vec<Rational>,
    pub verdict: Verdict,
}

/// Checks symplecticity, the cloning identity and `-ω = F^T σ F`, all exactly.
///
/// `φ` is linear, so the identity for every `x` follows from `x = 0` and the
/// basis vectors of `M`.
pub fn verify_cloning(c: &CloningProcess) -> Result<VerificationReport> {
    let dm = c.object_dim();
    let dk = c.machine_dim();
    let xi = c.total_form();

    let defect = symplectic_defect(&c.phi, &xi, &xi)?;
    let symplectic_defect_norm = defect.max_abs();
    let first_defect_entry = defect
        .first_nonzero()
        .map(|(row, col, value)| DefectEntry { row, col, value });

    let zero_x = vec![Rational::zero(); dm];
    let offset_image = c.phi.mul_vec(&c.input_state(&zero_x))?;
    let inferred_offset = offset_image[2 * dm..].to_vec();
    let inferred_readout = c.phi.block(2 * dm, 0, dk, dm);

    let mut cloning_residual = Rational::zero();
    let mut first_cloning_failure = None;
    let mut record = |basis_index: Option<usize>, diff: Vec<Rational>| {
        if let Some(coordinate) = diff.iter().position(|v| !v.is_zero()) {
            let worst = max_abs(&diff);
            if worst > cloning_residual {
                cloning_residual = worst;
            }
            if first_cloning_failure.is_none() {
                first_cloning_failure = Some(CloningFailure {
                    basis_index,
                    coordinate,
                    residual: diff[coordinate].clone(),
                });
            }
        }
    };

    // x = 0: φ(0, b, r) must be (0, 0, f(0)).
    let mut diff0 = offset_image[..2 * dm].to_vec();
    diff0.extend(std::iter::repeat_n(Rational::zero(), dk));
    record(None, diff0);

    for j in 0..dm {
        let e = unit_vector(dm, j);
        let image: Vec<Rational> = c.phi.column(j).iter().zip(&offset_image).map(|(a, b)| a + b).collect();
        let fe = c.readout.mul_vec(&e)?;
        let expected: Vec<Rational> = e
            .iter()
            .chain(&e)
            .cloned()
            .chain(fe.iter().zip(&inferred_offset).map(|(a, b)| a + b))
            .collect();
        let diff: Vec<Rational> = image.iter().zip(&expected).map(|(a, b)| a - b).collect();
        record(Some(j), diff);
    }

    let readout_defect = symplectic_defect(&c.readout, &c.object_form.negated(), &c.machine_form)?;
    let readout_defect_norm = readout_defect.max_abs();

    let mut reasons = Vec::new();
    if let Some(d) = &first_defect_entry {
        reasons.push(format!(
            "phi is not symplectic: defect entry ({}, {}) = {}",
            d.row, d.col, d.value
        ));
    }
    if let Some(f) = &first_cloning_failure {
        let state = match f.basis_index {
            Some(i) => format!("basis state e{i}"),
            None => "the zero state".to_string(),
        };
        reasons.push(format!(
            "cloning identity fails at {state}, coordinate {}: residual {}",
            f.coordinate, f.residual
        ));
    }
    if !readout_defect_norm.is_zero() {
        reasons.push(format!(
            "readout violates -omega = F^T sigma F (max defect {readout_defect_norm})"
        ));
    }
    let verdict = if reasons.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail(reasons.join("; "))
    };

    Ok(VerificationReport {
        symplectic_defect_norm,
        first_defect_entry,
        cloning_residual,
        first_cloning_failure,
        readout_defect_norm,
        inferred_readout,
        inferred_offset,
        verdict,
    })
}

/// The explicit process on `(R^2, J)` with machine `(R^2, J)` and `b = r = 0`.
pub fn basic_cloner() -> CloningProcess {
    let phi = RatMatrix::from_i64(&[
        [1, 0, 1, 0, 0, 0],
        [0, 1, 0, 0, 0, -1],
        [1, 0, -1, 0, 1, 0],
        [0, 1, 0, -1, 0, -1],
        [1, 0, 0, 0, 1, 0],
        [0, -1, 0, 1, 0, 2],
    ]);
    let readout = RatMatrix::from_i64(&[[1, 0], [0, -1]]);
    let j = standard_form(1);
    CloningProcess {
        object_form: j.clone(),
        blank: vec![Rational::zero(); 2],
        machine_form: j,
        ready: vec![Rational::zero(); 2],
        phi,
        readout,
    }
}

/// The process for the zero-dimensional space.
pub fn trivial_cloner() -> CloningProcess {
    CloningProcess {
        object_form: standard_form(0),
        blank: Vec::new(),
        machine_form: standard_form(0),
        ready: Vec::new(),
        phi: RatMatrix::zeros(0, 0),
        readout: RatMatrix::zeros(0, 0),
    }
}

/// Permutation taking block layout `(A1, B1, C1, A2, B2, C2)` to
/// `(A1, A2, B1, B2, C1, C2)`, with block sizes given in the former order.
/// Acts as `new = P * old`.
pub fn shuffle_permutation(dims: [usize; 6]) -> RatMatrix {
    let source = shuffle_source(dims);
    let mut p = RatMatrix::zeros(source.len(), source.len());
    for (new_pos, &old) in source.iter().enumerate() {
        p[(new_pos, old)] = num_traits::One::one();
    }
    p
}

// source[new] = old coordinate for the shuffle above
fn shuffle_source(dims: [usize; 6]) -> Vec<usize> {
    let mut starts = [0usize; 6];
    for i in 1..6 {
        starts[i] = starts[i - 1] + dims[i - 1];
    }
    [0, 3, 1, 4, 2, 5]
        .into_iter()
        .flat_map(|b| starts[b]..starts[b] + dims[b])
        .collect()
}

/// Combines processes for `M1` and `M2` into one for `M1 × M2` with machine
/// `N1 × N2`. Both inputs must verify.
pub fn product_cloner(c1: &CloningProcess, c2: &CloningProcess) -> Result<CloningProcess> {
    for (i, c) in [c1, c2].into_iter().enumerate() {
        if let Verdict::Fail(reason) = verify_cloning(c)?.verdict {
            return Err(Error::InvalidArgument(format!(
                "factor {} is not a cloning process: {reason}",
                i + 1
            )));
        }
    }
    product_unchecked(c1, c2)
}

fn product_unchecked(c1: &CloningProcess, c2: &CloningProcess) -> Result<CloningProcess> {
    let (m1, k1) = (c1.object_dim(), c1.machine_dim());
    let (m2, k2) = (c2.object_dim(), c2.machine_dim());
    let source = shuffle_source([m1, m1, k1, m2, m2, k2]);
    let stacked = RatMatrix::block_diag(&[&c1.phi, &c2.phi]);
    // P S P^T for the shuffle P, done by reindexing
    let n = source.len();
    let mut phi = RatMatrix::zeros(n, n);
    for (a, &i) in source.iter().enumerate() {
        for (b, &j) in source.iter().enumerate() {
            phi[(a, b)] = stacked[(i, j)].clone();
        }
    }
    Ok(CloningProcess {
        object_form: direct_sum(&c1.object_form, &c2.object_form),
        blank: c1.blank.iter().chain(&c2.blank).cloned().collect(),
        machine_form: direct_sum(&c1.machine_form, &c2.machine_form),
        ready: c1.ready.iter().chain(&c2.ready).cloned().collect(),
        phi,
        readout: RatMatrix::block_diag(&[&c1.readout, &c2.readout]),
    })
}

/// Process for the standard space of `n` degrees of freedom: the `n`-fold
/// product of [`basic_cloner`].
pub fn standard_cloner(n: usize) -> CloningProcess {
    // Equal to the n-fold product: the shuffle puts pair i of every block at
    // rows 2i, 2i+1 of that block, so fill those positions directly.
    let basic = basic_cloner();
    let d = 2 * n;
    let at = |r: usize, i: usize| (r / 2) * d + 2 * i + r % 2;
    let mut phi = RatMatrix::zeros(3 * d, 3 * d);
    let mut readout = RatMatrix::zeros(d, d);
    for i in 0..n {
        for r in 0..6 {
            for c in 0..6 {
                phi[(at(r, i), at(c, i))] = basic.phi[(r, c)].clone();
            }
        }
        for r in 0..2 {
            for c in 0..2 {
                readout[(2 * i + r, 2 * i + c)] = basic.readout[(r, c)].clone();
            }
        }
    }
    let j = standard_form(n);
    CloningProcess {
        object_form: j.clone(),
        blank: vec![Rational::zero(); d],
        machine_form: j,
        ready: vec![Rational::zero(); d],
        phi,
        readout,
    }
}

/// Process for an arbitrary symplectic vector space: normalize with a Darboux
/// basis `P`, clone in standard coordinates, and conjugate the object and
/// blank blocks by `P`. The machine is the standard space of the same
/// dimension.
pub fn general_cloner(form: &SkewForm) -> Result<CloningProcess> {
    let n = form.degrees_of_freedom();
    let p = darboux_basis(form)?;
    let j = standard_form(n);
    // P^T Ω P = J implies P^-1 = J^-1 P^T Ω = -J P^T Ω.
    let p_inv = j.matrix().neg().mul(&p.transpose())?.mul(form.matrix())?;
    let std = standard_cloner(n);
    let id = RatMatrix::identity(std.machine_dim());
    let q = RatMatrix::block_diag(&[&p, &p, &id]);
    let q_inv = RatMatrix::block_diag(&[&p_inv, &p_inv, &id]);
    let phi = q.mul(&std.phi)?.mul(&q_inv)?;
    let readout = std.readout.mul(&p_inv)?;
    Ok(CloningProcess {
        object_form: form.clone(),
        blank: vec![Rational::zero(); form.dim()],
        machine_form: std.machine_form,
        ready: std.ready,
        phi,
        readout,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ReadoutOutcome {
    Solved { readout: RatMatrix },
    Infeasible { reason: String, detail: String },
}

/// Solves `F^T J_k F = -J_m` for a `2k x 2m` readout `F`.
///
/// For `k >= m` each object block maps to its own machine block through
/// `diag(1, -1)`, with zero rows for the spare machine blocks. For `k < m`
/// no solution exists: `-J_m` is nondegenerate, so `F` would have to be
/// injective into a smaller space.
pub fn readout_solver(m: usize, k: usize) -> ReadoutOutcome {
    if k < m {
        return ReadoutOutcome::Infeasible {
            reason: "rank".to_string(),
            detail: format!(
                "F^T sigma F = -omega forces rank(F) = {} but F maps into a space of dimension {}",
                2 * m,
                2 * k
            ),
        };
    }
    let mut f = RatMatrix::zeros(2 * k, 2 * m);
    for i in 0..m {
        f[(2 * i, 2 * i)] = num_traits::One::one();
        f[(2 * i + 1, 2 * i + 1)] = crate::rational::int(-1);
    }
    ReadoutOutcome::Solved { readout: f }
}

/// The part of a candidate the size bound talks about. Deserializes from a
/// full process JSON as well, ignoring `phi` and the states.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct SizeCandidate {
    pub object_form: SkewForm,
    pub machine_form: SkewForm,
    pub readout: RatMatrix,
}

impl From<&CloningProcess> for SizeCandidate {
    fn from(c: &CloningProcess) -> Self {
        SizeCandidate {
            object_form: c.object_form.clone(),
            machine_form: c.machine_form.clone(),
            readout: c.readout.clone(),
        }
    }
}

/// A nonzero `w` with `F w = 0`, together with a partner `v` such that
/// `ω(w, v) ≠ 0` while `σ(F w, F v) = 0`: the pullback identity fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeWitness {
    #[serde(with = "serde_vec")]
    pub kernel_vector: Vec<Rational>,
    #[serde(with = "serde_vec")]
    pub image: Vec<Rational>,
    pub partner_index: usize,
    #[serde(with = "serde_string")]
    pub omega_value: Rational,
    #[serde(with = "serde_string")]
    pub pullback_value: Rational,
}

pub fn size_witness(candidate: &SizeCandidate) -> Result<SizeWitness> {
    let dm = candidate.object_form.dim();
    let dk = candidate.machine_form.dim();
    let f = &candidate.readout;
    if f.rows() != dk || f.cols() != dm {
        return Err(shape(
            "readout",
            format!("{dk}x{dm}"),
            format!("{}x{}", f.rows(), f.cols()),
        ));
    }
    if dk >= dm {
        return Err(Error::NotApplicable(format!(
            "machine dimension {dk} is not smaller than object dimension {dm}"
        )));
    }
    let kernel = form_kernel(f);
    let w = kernel.into_iter().next().expect("rank(F) <= dim N < dim M");
    let image = f.mul_vec(&w)?;
    debug_assert!(is_zero_vector(&image));
    let omega = &candidate.object_form;
    let (partner_index, omega_value) = (0..dm)
        .map(|j| (j, omega.evaluate(&w, &unit_vector(dm, j))))
        .find_map(|(j, v)| match v {
            Ok(v) if !v.is_zero() => Some(Ok((j, v))),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .expect("ω is nondegenerate and w ≠ 0")?;
    let fv = f.mul_vec(&unit_vector(dm, partner_index))?;
    let pullback_value = candidate.machine_form.evaluate(&image, &fv)?;
    Ok(SizeWitness {
        kernel_vector: w,
        image,
        partner_index,
        omega_value,
        pullback_value,
    })
}
