//! Fixtures shared by the benchmarks.

use symclone_core::{int, RatMatrix, SkewForm};

/// A dense nondegenerate skew form of dimension `2n`: a large `J`-shaped
/// superdiagonal plus small deterministic off-diagonal entries.
pub fn dense_form(n: usize) -> SkewForm {
    let dim = 2 * n;
    let mut m = RatMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let mut v = ((i * 7 + j * 3) % 5) as i64 - 2;
            if j == i + 1 && i % 2 == 0 {
                v += 5;
            }
            m[(i, j)] = int(v);
            m[(j, i)] = int(-v);
        }
    }
    SkewForm::new(m).expect("bench form should be nondegenerate")
}
