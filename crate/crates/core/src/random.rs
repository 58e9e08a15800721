//! Seeded generators for rational forms and symplectic maps.

use num_traits::Zero;
use rand::Rng;

use crate::form::SkewForm;
use crate::matrix::RatMatrix;
use crate::rational::{rat, Rational};

/// A random nondegenerate skew form of even dimension `dim` with entries
/// `p/q`, `|p| <= 4`, `1 <= q <= 3`. Degenerate draws are rejected.
pub fn random_skew_form<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> SkewForm {
    assert!(dim.is_multiple_of(2), "symplectic forms have even dimension");
    loop {
        let mut m = RatMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i + 1..dim {
                let v = random_small(rng);
                m[(j, i)] = -v.clone();
                m[(i, j)] = v;
            }
        }
        if let Ok(f) = SkewForm::new(m) {
            return f;
        }
    }
}

fn random_small<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    rat(rng.random_range(-4..=4), rng.random_range(1..=3))
}

/// Symplectic transvection `x ↦ x + c ω(v, x) v`, i.e. `I + c v v^T Ω`.
pub fn transvection(form: &SkewForm, v: &[Rational], c: &Rational) -> RatMatrix {
    let n = form.dim();
    let row = form.matrix().transpose().mul_vec(v).expect("vector matches form"); // (v^T Ω)^T
    let mut t = RatMatrix::identity(n);
    for i in 0..n {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..n {
            let add = c * &v[i] * &row[j];
            t[(i, j)] += add;
        }
    }
    t
}

/// Product of `count` random transvections; symplectic for `form`.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, form: &SkewForm, count: usize) -> RatMatrix {
    let n = form.dim();
    let mut s = RatMatrix::identity(n);
    for _ in 0..count {
        let v: Vec<Rational> = (0..n).map(|_| rat(rng.random_range(-2..=2), 1)).collect();
        let c = random_small(rng);
        s = transvection(form, &v, &c).mul(&s).expect("square");
    }
    s
}
