//! Floating-point search for cloning maps in the infeasible regime.
//!
//! The search space is every linear `φ` on `M × M × N` whose object columns
//! are `(e, e, F e)` for a free readout `F`; the remaining columns are free.
//! Only symplecticity is relaxed, and the probe minimizes the Frobenius norm
//! of `φ^T ξ φ - ξ` by gradient descent with backtracking.
//!
//! For `k = 0` the object-object block of the defect is forced to equal `J`
//! whatever the free columns are, so no run can go below `‖J_{2m}‖_F = √(2m)`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

const MAX_RESTARTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub m: usize,
    pub k: usize,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Smallest Frobenius norm of the symplectic defect seen.
    pub best_residual: f64,
    /// `√(2m)` when `k = 0`, otherwise `None`.
    pub analytic_lower_bound: Option<f64>,
}

fn standard_form_f64(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(2 * i, 2 * i + 1)] = 1.0;
        j[(2 * i + 1, 2 * i)] = -1.0;
    }
    j
}

struct Problem {
    object: usize,
    machine: usize,
    xi: DMatrix<f64>,
}

impl Problem {
    fn total(&self) -> usize {
        2 * self.object + self.machine
    }

    /// φ from the free parameters: readout `F` (machine x object) and the
    /// trailing `object + machine` columns.
    fn assemble(&self, readout: &DMatrix<f64>, free: &DMatrix<f64>) -> DMatrix<f64> {
        let (dm, dk) = (self.object, self.machine);
        let mut phi = DMatrix::zeros(self.total(), self.total());
        for j in 0..dm {
            phi[(j, j)] = 1.0;
            phi[(dm + j, j)] = 1.0;
        }
        phi.view_mut((2 * dm, 0), (dk, dm)).copy_from(readout);
        phi.view_mut((0, dm), (self.total(), dm + dk)).copy_from(free);
        phi
    }

    fn defect(&self, phi: &DMatrix<f64>) -> DMatrix<f64> {
        phi.transpose() * &self.xi * phi - &self.xi
    }

    fn objective(&self, readout: &DMatrix<f64>, free: &DMatrix<f64>) -> f64 {
        self.defect(&self.assemble(readout, free)).norm_squared()
    }

    /// Gradients of ‖D‖² with respect to F and the free columns.
    /// With ξ and D skew, d‖D‖²/dφ = -4 ξ φ D.
    fn gradient(&self, readout: &DMatrix<f64>, free: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let (dm, dk) = (self.object, self.machine);
        let phi = self.assemble(readout, free);
        let d = self.defect(&phi);
        let g = (&self.xi * &phi * &d) * -4.0;
        (
            g.view((2 * dm, 0), (dk, dm)).into_owned(),
            g.view((0, dm), (self.total(), dm + dk)).into_owned(),
        )
    }
}

/// Runs the probe for an object of `m` and a machine of `k` degrees of freedom.
/// Requires `k < m`; deterministic for a given seed.
pub fn clone_residual_probe(m: usize, k: usize, iterations: usize, seed: u64) -> Result<ProbeResult> {
    if k >= m {
        return Err(Error::NotApplicable(format!(
            "a machine of {k} degrees of freedom can clone {m}; use the readout solver"
        )));
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be at least 1".to_string()));
    }
    let xi = {
        let blocks = [standard_form_f64(m), standard_form_f64(m), standard_form_f64(k)];
        let n: usize = blocks.iter().map(|b| b.nrows()).sum();
        let mut xi = DMatrix::zeros(n, n);
        let mut at = 0;
        for b in &blocks {
            xi.view_mut((at, at), b.shape()).copy_from(b);
            at += b.nrows();
        }
        xi
    };
    let problem = Problem {
        object: 2 * m,
        machine: 2 * k,
        xi,
    };

    let restarts = iterations.min(MAX_RESTARTS);
    let per_restart = iterations / restarts;
    let mut best = f64::INFINITY;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let steps = if r + 1 == restarts {
            iterations - per_restart * (restarts - 1)
        } else {
            per_restart
        };
        best = best.min(descend(&problem, steps, &mut rng));
    }

    Ok(ProbeResult {
        m,
        k,
        iterations,
        restarts,
        seed,
        best_residual: best,
        analytic_lower_bound: (k == 0).then(|| ((2 * m) as f64).sqrt()),
    })
}

fn descend(problem: &Problem, steps: usize, rng: &mut ChaCha8Rng) -> f64 {
    let (dm, dk) = (problem.object, problem.machine);
    let mut readout = DMatrix::from_fn(dk, dm, |_, _| rng.random_range(-1.0..1.0));
    let mut free = DMatrix::from_fn(problem.total(), dm + dk, |_, _| rng.random_range(-1.0..1.0));
    let mut value = problem.objective(&readout, &free);
    let mut best = value;
    let mut step = 0.1;

    for _ in 0..steps {
        let (g_readout, g_free) = problem.gradient(&readout, &free);
        let g_norm2 = g_readout.norm_squared() + g_free.norm_squared();
        if g_norm2 < 1e-30 {
            break;
        }
        step *= 2.0;
        loop {
            let r_new = &readout - &g_readout * step;
            let f_new = &free - &g_free * step;
            let v_new = problem.objective(&r_new, &f_new);
            if v_new <= value - 1e-4 * step * g_norm2 {
                readout = r_new;
                free = f_new;
                value = v_new;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return best.sqrt();
            }
        }
        best = best.min(value);
    }
    best.sqrt()
}
