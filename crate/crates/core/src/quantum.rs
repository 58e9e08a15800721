//! Finite-dimensional Hilbert spaces and the quantum no-cloning argument.
//!
//! A cloning unitary would send `ψ ⊗ β ⊗ ρ` to `ψ ⊗ ψ ⊗ f(ψ)`. Taking inner
//! products of two such images gives `⟨ψ,ψ̃⟩ = ⟨ψ,ψ̃⟩² ⟨f(ψ),f(ψ̃)⟩`, so for
//! `0 < |⟨ψ,ψ̃⟩| < 1` the readouts would need `|⟨f(ψ),f(ψ̃)⟩| > 1`, which
//! Cauchy-Schwarz forbids for unit vectors. [`refute_cloning`] evaluates this
//! chain on a concrete isometry.

use num_complex::Complex64;
use rand::Rng;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{shape, Error, Result};

/// Default tolerance for isometry and unit-norm checks.
pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Computational basis vector `|i⟩`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim];
        entries[i] = Complex64::new(1.0, 0.0);
        Self { entries }
    }

    pub fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let v = Self::new(
                (0..dim)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            );
            if v.norm() > 1e-3 {
                return v.normalized();
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `⟨self, other⟩`, antilinear in the first argument.
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product of unequal dimensions");
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.entries.iter().map(|z| z / n).collect())
    }

    pub fn kron(&self, other: &ComplexVector) -> Self {
        Self::new(
            self.entries
                .iter()
                .flat_map(|a| other.entries.iter().map(move |b| a * b))
                .collect(),
        )
    }

    pub fn distance(&self, other: &ComplexVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `dim x 1` matrix, i.e. the arrow `C -> H` sending 1 to this vector.
    pub fn as_column(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.dim(),
            cols: 1,
            entries: self.entries.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(shape("complex matrix", rows * cols, entries.len()));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[ComplexVector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.dim(), rows);
            for i in 0..rows {
                m.entries[i * m.cols + j] = c.entries[i];
            }
        }
        m
    }

    /// A unitary obtained by Gram-Schmidt orthonormalization of a random matrix.
    pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut basis: Vec<ComplexVector> = Vec::with_capacity(n);
        while basis.len() < n {
            let mut v = ComplexVector::random_unit(n, rng);
            // two passes keep the result orthogonal to working precision
            for _ in 0..2 {
                for b in &basis {
                    let c = b.inner(&v);
                    for (vi, bi) in v.entries.iter_mut().zip(&b.entries) {
                        *vi -= c * bi;
                    }
                }
            }
            if v.norm() > 1e-6 {
                basis.push(v.normalized());
            }
        }
        Self::from_columns(n, &basis)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(shape("complex matrix product", self.cols, rhs.rows));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.entries[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.dim() {
            return Err(shape("complex matrix-vector product", self.cols, v.dim()));
        }
        Ok(ComplexVector::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.get(i, j) * v.entries[j]).sum())
                .collect(),
        ))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-entry deviation of `U†U` from the identity.
    pub fn isometry_defect(&self) -> Result<f64> {
        if self.rows < self.cols {
            return Err(Error::NotIsometry(format!(
                "{}x{} maps into a smaller space",
                self.rows, self.cols
            )));
        }
        let gram = self.adjoint().mul(self)?;
        Ok(gram.max_abs_diff(&Self::identity(self.cols)))
    }

    pub fn is_isometry(&self, tol: f64) -> bool {
        self.isometry_defect().is_ok_and(|d| d <= tol)
    }
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a.get(i, j);
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.entries[(i * b.rows + k) * cols + j * b.cols + l] = s * b.get(k, l);
                }
            }
        }
    }
    out
}

/// The controlled shift `|i, j⟩ ↦ |i, j + i mod d⟩`, which copies the
/// computational basis onto a blank `|0⟩`. For `d = 2` this is CNOT.
pub fn basis_cloner(d: usize) -> ComplexMatrix {
    let n = d * d;
    let mut u = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            let from = i * d + j;
            let to = i * d + (j + i) % d;
            u.entries[to * n + from] = Complex64::new(1.0, 0.0);
        }
    }
    u
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refutation {
    /// `⟨ψ, ψ̃⟩` as `[re, im]`.
    pub overlap: [f64; 2],
    /// `⟨U(ψ⊗β⊗ρ), U(ψ̃⊗β⊗ρ)⟩`, equal to the overlap for an isometry.
    pub output_overlap: [f64; 2],
    /// `|⟨f(ψ), f(ψ̃)⟩|` that perfect cloning would force.
    pub implied_readout_overlap: f64,
    /// How far the forced readout overlap exceeds the Cauchy-Schwarz bound of 1.
    pub cauchy_schwarz_excess: f64,
    pub cloning_residual_psi: f64,
    pub cloning_residual_psi2: f64,
    /// Larger of the two per-state residuals.
    pub direct_cloning_residual: f64,
}

fn check_unit(name: &str, v: &ComplexVector) -> Result<()> {
    if (v.norm() - 1.0).abs() > ISOMETRY_TOL {
        return Err(Error::InvalidArgument(format!(
            "{name} is not a unit vector (norm {})",
            v.norm()
        )));
    }
    Ok(())
}

/// Distance from `U(ψ⊗β⊗ρ)` to the nearest `ψ⊗ψ⊗κ` with `κ` a unit vector
/// of the machine space, i.e. how badly `U` fails to clone `ψ`.
pub fn cloning_residual(
    u: &ComplexMatrix,
    beta: &ComplexVector,
    rho: &ComplexVector,
    psi: &ComplexVector,
) -> Result<f64> {
    let out = u.apply(&psi.kron(beta).kron(rho))?;
    let d = psi.dim();
    let kd = rho.dim();
    if out.dim() != d * d * kd {
        return Err(shape("cloning output", d * d * kd, out.dim()));
    }
    let mut best_norm2 = 0.0;
    for l in 0..kd {
        let mut kappa = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                kappa += (psi.entries[i] * psi.entries[j]).conj() * out.entries[(i * d + j) * kd + l];
            }
        }
        best_norm2 += kappa.norm_sqr();
    }
    let out_norm2 = out.norm().powi(2);
    Ok((out_norm2 + 1.0 - 2.0 * best_norm2.sqrt()).max(0.0).sqrt())
}

/// Evaluates the no-cloning contradiction for `U` on the pair `ψ, ψ̃`.
pub fn refute_cloning(
    u: &ComplexMatrix,
    beta: &ComplexVector,
    rho: &ComplexVector,
    psi: &ComplexVector,
    psi2: &ComplexVector,
) -> Result<Refutation> {
    let d = psi.dim();
    if psi2.dim() != d || beta.dim() != d {
        return Err(shape(
            "states",
            format!("psi, psi2 and beta of dimension {d}"),
            format!("{} and {}", psi2.dim(), beta.dim()),
        ));
    }
    let total = d * d * rho.dim();
    if u.rows() != total || u.cols() != total {
        return Err(shape(
            "cloning unitary",
            format!("{total}x{total}"),
            format!("{}x{}", u.rows(), u.cols()),
        ));
    }
    if d <= 1 {
        return Err(Error::NoValidPair(d));
    }
    for (name, v) in [("beta", beta), ("rho", rho), ("psi", psi), ("psi2", psi2)] {
        check_unit(name, v)?;
    }
    let defect = u.isometry_defect()?;
    if defect > ISOMETRY_TOL {
        return Err(Error::NotIsometry(format!("max |U†U - I| = {defect:e}")));
    }
    let overlap = psi.inner(psi2);
    let a = overlap.norm();
    if a <= ISOMETRY_TOL || a >= 1.0 - ISOMETRY_TOL {
        return Err(Error::Hypothesis(format!("need 0 < |<psi, psi2>| < 1, got {a}")));
    }
    let lhs = u.apply(&psi.kron(beta).kron(rho))?;
    let rhs = u.apply(&psi2.kron(beta).kron(rho))?;
    let s = lhs.inner(&rhs);
    // s = <psi,psi2>^2 <f psi, f psi2>  under the cloning hypothesis
    let implied = s.norm() / (a * a);
    let r1 = cloning_residual(u, beta, rho, psi)?;
    let r2 = cloning_residual(u, beta, rho, psi2)?;
    Ok(Refutation {
        overlap: [overlap.re, overlap.im],
        output_overlap: [s.re, s.im],
        implied_readout_overlap: implied,
        cauchy_schwarz_excess: implied - 1.0,
        cloning_residual_psi: r1,
        cloning_residual_psi2: r2,
        direct_cloning_residual: r1.max(r2),
    })
}

type Pair = [f64; 2];

fn to_pair(z: &Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Serialize)]
struct VectorRepr {
    dim: usize,
    entries: Vec<Pair>,
}

#[derive(Deserialize)]
struct VectorInput {
    dim: usize,
    entries: Vec<Pair>,
}

impl Serialize for ComplexVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorRepr {
            dim: self.dim(),
            entries: self.entries.iter().map(to_pair).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = VectorInput::deserialize(d)?;
        if v.entries.len() != v.dim {
            return Err(de::Error::custom(shape("complex vector JSON", v.dim, v.entries.len())));
        }
        Ok(Self::new(
            v.entries.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        ))
    }
}

#[derive(Serialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Pair>>,
}

#[derive(Deserialize)]
struct MatrixInput {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Pair>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|i| (0..self.cols).map(|j| to_pair(&self.get(i, j))).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = MatrixInput::deserialize(d)?;
        if m.entries.len() != m.rows || m.entries.iter().any(|r| r.len() != m.cols) {
            return Err(de::Error::custom(shape(
                "complex matrix JSON",
                format!("{}x{}", m.rows, m.cols),
                "ragged or mis-sized rows",
            )));
        }
        let entries = m
            .entries
            .iter()
            .flat_map(|r| r.iter().map(|p| Complex64::new(p[0], p[1])))
            .collect();
        Ok(Self {
            rows: m.rows,
            cols: m.cols,
            entries,
        })
    }
}
