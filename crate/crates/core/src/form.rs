//! Symplectic forms on rational vector spaces, symplectic maps and
//! Darboux normalization.
//!
//! The standard form uses pairwise 2x2 blocks `[[0, 1], [-1, 0]]` along the
//! diagonal, so coordinates come in (q, p) pairs. Matrices written in the
//! aggregate `[[0, I], [-I, 0]]` convention must be permuted before import.

use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{shape, Error, Result};
use crate::matrix::{bilinear, unit_vector, MatrixInput, RatMatrix};
use crate::rational::Rational;

/// A nondegenerate skew-symmetric rational matrix of even dimension.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SkewForm {
    matrix: RatMatrix,
}

impl SkewForm {
    /// Validates skew-symmetry, even dimension and nondegeneracy.
    pub fn new(matrix: RatMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(shape(
                "skew form",
                "square matrix",
                format!("{}x{}", matrix.rows(), matrix.cols()),
            ));
        }
        let dim = matrix.rows();
        if !dim.is_multiple_of(2) {
            return Err(Error::OddDimension(dim));
        }
        if let Some((row, col)) = matrix.skew_violation() {
            return Err(Error::NotSkewSymmetric { row, col });
        }
        let rank = matrix.rank();
        if rank < dim {
            return Err(Error::Degenerate { rank, dim });
        }
        Ok(Self { matrix })
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn new_unchecked(matrix: RatMatrix) -> Self {
        debug_assert!(matrix.is_square() && matrix.rows().is_multiple_of(2));
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Half the dimension.
    pub fn degrees_of_freedom(&self) -> usize {
        self.dim() / 2
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RatMatrix {
        self.matrix
    }

    /// `ω(x, y) = x^T Ω y`.
    pub fn evaluate(&self, x: &[Rational], y: &[Rational]) -> Result<Rational> {
        bilinear(&self.matrix, x, y)
    }

    pub fn negated(&self) -> SkewForm {
        SkewForm::new_unchecked(self.matrix.neg())
    }
}

impl std::fmt::Debug for SkewForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SkewForm({:?})", self.matrix)
    }
}

/// `2n x 2n` block diagonal matrix of `n` standard blocks.
pub fn standard_form(n: usize) -> SkewForm {
    let mut m = RatMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(2 * i, 2 * i + 1)] = Rational::one();
        m[(2 * i + 1, 2 * i)] = -Rational::one();
    }
    SkewForm::new_unchecked(m)
}

/// Form on the product space: block diagonal sum.
pub fn direct_sum(a: &SkewForm, b: &SkewForm) -> SkewForm {
    SkewForm::new_unchecked(RatMatrix::block_diag(&[a.matrix(), b.matrix()]))
}

pub fn direct_sum_all(forms: &[&SkewForm]) -> SkewForm {
    let blocks: Vec<&RatMatrix> = forms.iter().map(|f| f.matrix()).collect();
    SkewForm::new_unchecked(RatMatrix::block_diag(&blocks))
}

fn check_map_shape(s: &RatMatrix, form_in: &SkewForm, form_out: &SkewForm) -> Result<()> {
    if s.cols() != form_in.dim() || s.rows() != form_out.dim() {
        return Err(shape(
            "symplectic map",
            format!("{}x{}", form_out.dim(), form_in.dim()),
            format!("{}x{}", s.rows(), s.cols()),
        ));
    }
    Ok(())
}

/// `S^T Σ S - Ω`, zero exactly when `S` is symplectic.
pub fn symplectic_defect(s: &RatMatrix, form_in: &SkewForm, form_out: &SkewForm) -> Result<RatMatrix> {
    check_map_shape(s, form_in, form_out)?;
    let pulled = s.transpose().mul(&form_out.matrix().mul(s)?)?;
    pulled.sub(form_in.matrix())
}

pub fn is_symplectic_map(s: &RatMatrix, form_in: &SkewForm, form_out: &SkewForm) -> Result<bool> {
    Ok(symplectic_defect(s, form_in, form_out)?.is_zero())
}

/// Null space basis of an arbitrary rational matrix.
pub fn form_kernel(matrix: &RatMatrix) -> Vec<Vec<Rational>> {
    matrix.kernel()
}

/// Symplectic Gram-Schmidt over the rationals.
///
/// Returns `P` whose columns `e_1, f_1, ..., e_n, f_n` satisfy
/// `ω(e_i, f_i) = 1` and vanish on every other pair, so that
/// `P^T Ω P = standard_form(n)`. The matrix is validated again here because
/// it is cheap and the loop relies on nondegeneracy to find partners.
pub fn darboux_basis(form: &SkewForm) -> Result<RatMatrix> {
    let dim = form.dim();
    let omega = form.matrix();
    if !dim.is_multiple_of(2) {
        return Err(Error::OddDimension(dim));
    }
    let mut pool: Vec<Vec<Rational>> = (0..dim).map(|i| unit_vector(dim, i)).collect();
    let mut columns = Vec::with_capacity(dim);

    while !pool.is_empty() {
        let e = pool.remove(0);
        let omega_e = omega.transpose().mul_vec(&e)?; // ω(e, v) = (Ω^T e) . v
        let partner = pool.iter().position(|v| !dot(&omega_e, v).is_zero());
        let Some(idx) = partner else {
            return Err(Error::Degenerate {
                rank: columns.len(),
                dim,
            });
        };
        let f_raw = pool.remove(idx);
        let pairing = dot(&omega_e, &f_raw);
        let f: Vec<Rational> = f_raw.iter().map(|v| v / &pairing).collect();
        let omega_f = omega.transpose().mul_vec(&f)?;

        // v <- v - ω(v, f) e + ω(v, e) f, projecting onto the ω-complement of span(e, f).
        for v in pool.iter_mut() {
            let v_f = -dot(&omega_f, v); // ω(v, f) = -ω(f, v)
            let v_e = -dot(&omega_e, v);
            if v_f.is_zero() && v_e.is_zero() {
                continue;
            }
            for ((vi, ei), fi) in v.iter_mut().zip(&e).zip(&f) {
                *vi += &v_e * fi - &v_f * ei;
            }
        }
        columns.push(e);
        columns.push(f);
    }
    Ok(RatMatrix::from_columns(dim, &columns))
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

#[derive(Serialize)]
struct FormRepr<'a> {
    dim: usize,
    #[serde(flatten)]
    matrix: &'a RatMatrix,
}

impl Serialize for SkewForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormRepr {
            dim: self.dim(),
            matrix: &self.matrix,
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
struct FormInput {
    dim: usize,
    #[serde(flatten)]
    matrix: MatrixInput,
}

impl<'de> Deserialize<'de> for SkewForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let input = FormInput::deserialize(d)?;
        let dim = input.dim;
        let matrix = input.matrix.into_matrix().map_err(de::Error::custom)?;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(de::Error::custom(shape(
                "skew form JSON",
                format!("{dim}x{dim} matrix"),
                format!("{}x{}", matrix.rows(), matrix.cols()),
            )));
        }
        SkewForm::new(matrix).map_err(de::Error::custom)
    }
}
