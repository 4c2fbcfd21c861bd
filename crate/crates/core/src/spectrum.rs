//! Full Hermitian eigendecomposition and ground-state extraction.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::diag::Diag;
use faer::prelude::{Reborrow, ReborrowMut};
use faer::{c64, ColRef, Mat, MatRef, Par};

use crate::error::{invalid, Error, Result};
use crate::model::{build_hamiltonian, HamiltonianMatrix, ModelPoint};

/// Gap below which the ground state is treated as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Relative residual `‖H v - E v‖ / max(1, |E|_max)` an eigenpair must meet.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Eigenvalues closer than this (relative to the spectral scale) form one degenerate block.
const CLUSTER_TOLERANCE: f64 = 1e-12;

/// Minimum spread of bond-current eigenvalues for a degenerate block to be rotated.
const CURRENT_SPLIT_TOLERANCE: f64 = 1e-8;

/// Sorted eigenvalues with their orthonormal eigenvectors (column `γ` pairs with `E_γ`).
#[derive(Clone, Debug)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<c64>,
    residual_bound: f64,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> MatRef<'_, c64> {
        self.eigenvectors.as_ref()
    }

    pub fn eigenvector(&self, gamma: usize) -> ColRef<'_, c64> {
        self.eigenvectors.col(gamma)
    }

    /// Largest `‖H v_γ - E_γ v_γ‖₂` over the spectrum.
    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    /// Multiplies eigenvector `gamma` by `phase`, which should have unit modulus.
    ///
    /// Everything physical is independent of this choice; used to check gauge invariance.
    pub fn rephase(&mut self, gamma: usize, phase: c64) {
        for x in self.eigenvectors.col_mut(gamma).iter_mut() {
            *x *= phase;
        }
    }

    /// Largest deviation of `V†V` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = self.eigenvectors.as_ref();
        let gram = v.adjoint() * v;
        let n = self.len();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - c64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Lowest eigenpair and the gap to the first excited level.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub amplitudes: Vec<c64>,
    pub gap: f64,
    /// Set when `gap < DEGENERACY_TOLERANCE`.
    pub near_degenerate: bool,
}

impl GroundState {
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// Diagonalizes `h` and returns the validated eigensystem.
///
/// The eigenvector of each column is rotated so that its largest-modulus component
/// is real and positive. Exactly degenerate blocks are rotated onto eigenvectors
/// of the bond current, which turns the standing waves of a clean ring into
/// plane waves; blocks where the current does not split the levels are left as
/// the solver returned them.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<EigenSystem> {
    let n = h.size();
    let scale = h.max_abs().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * scale {
        return Err(invalid(format!(
            "matrix is not Hermitian (max |H_ij - conj(H_ji)| = {defect:.3e})"
        )));
    }

    let mut values = Diag::<c64>::zeros(n);
    let mut vectors = Mat::<c64>::zeros(n, n);
    let par = Par::Seq;
    let scratch = evd::self_adjoint_evd_scratch::<c64>(
        n,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    );
    let mut buf = MemBuffer::new(scratch);
    evd::self_adjoint_evd(
        h.as_mat(),
        values.as_mut(),
        Some(vectors.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::Computation {
        message: format!("eigensolver did not converge: {e:?}"),
        residual: f64::INFINITY,
    })?;

    let eigenvalues: Vec<f64> = values.column_vector().iter().map(|z| z.re).collect();
    let nonzeros = nonzeros(h);
    resolve_degenerate_blocks(&eigenvalues, &mut vectors, &nonzeros);
    for gamma in 0..n {
        fix_phase(vectors.col_mut(gamma));
    }

    let residual_bound = residual(&nonzeros, &eigenvalues, vectors.as_ref());
    let spread = eigenvalues
        .first()
        .map(|e| e.abs())
        .unwrap_or(0.0)
        .max(eigenvalues.last().map(|e| e.abs()).unwrap_or(0.0))
        .max(1.0);
    if !(residual_bound <= RESIDUAL_TOLERANCE * spread) {
        return Err(Error::Computation {
            message: "eigenpairs fail the residual check".into(),
            residual: residual_bound,
        });
    }

    Ok(EigenSystem { eigenvalues, eigenvectors: vectors, residual_bound })
}

/// Builds and diagonalizes the Hamiltonian at `p`.
pub fn solve(p: &ModelPoint) -> Result<EigenSystem> {
    diagonalize(&build_hamiltonian(p))
}

pub fn ground_state(es: &EigenSystem) -> Result<GroundState> {
    if es.len() < 2 {
        return Err(invalid("ground-state gap needs at least two levels"));
    }
    let gap = (es.eigenvalues[1] - es.eigenvalues[0]).max(0.0);
    Ok(GroundState {
        energy: es.eigenvalues[0],
        amplitudes: es.eigenvector(0).iter().copied().collect(),
        gap,
        near_degenerate: gap < DEGENERACY_TOLERANCE,
    })
}

type Triplet = (usize, usize, c64);

fn nonzeros(h: &HamiltonianMatrix) -> Vec<Triplet> {
    let n = h.size();
    let zero = c64::new(0.0, 0.0);
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let x = h.get(i, j);
            if x != zero {
                out.push((i, j, x));
            }
        }
    }
    out
}

fn residual(nonzeros: &[Triplet], eigenvalues: &[f64], vectors: MatRef<'_, c64>) -> f64 {
    let n = eigenvalues.len();
    let mut hv = vec![c64::new(0.0, 0.0); n];
    let mut worst = 0.0f64;
    for (gamma, &e) in eigenvalues.iter().enumerate() {
        let v = vectors.col(gamma);
        hv.iter_mut().for_each(|x| *x = c64::new(0.0, 0.0));
        for &(i, j, h) in nonzeros {
            hv[i] += h * v[j];
        }
        let norm2: f64 = hv
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b * e).norm_sqr())
            .sum();
        worst = worst.max(norm2.sqrt());
    }
    worst
}

fn fix_phase(mut col: faer::ColMut<'_, c64>) {
    let mut best = 0usize;
    let mut best_abs = -1.0f64;
    for (i, z) in col.rb().iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let pivot = col[best];
    let phase = pivot.conj() / best_abs;
    for z in col.rb_mut().iter_mut() {
        *z *= phase;
    }
    col[best] = c64::new(best_abs, 0.0);
}

/// `(J v)_n = i H_{n,n+1} v_{n+1} - i H_{n,n-1} v_{n-1}` on the ring `n mod N`.
fn bond_current_apply(nonzeros: &[Triplet], n: usize, v: ColRef<'_, c64>) -> Vec<c64> {
    let i_unit = c64::new(0.0, 1.0);
    let mut out = vec![c64::new(0.0, 0.0); n];
    for &(row, col, h) in nonzeros {
        if (row + 1) % n == col {
            out[row] += i_unit * h * v[col];
        } else if (col + 1) % n == row {
            out[row] -= i_unit * h * v[col];
        }
    }
    out
}

fn resolve_degenerate_blocks(eigenvalues: &[f64], vectors: &mut Mat<c64>, nonzeros: &[Triplet]) {
    let n = eigenvalues.len();
    if n < 3 {
        return;
    }
    let scale = eigenvalues
        .iter()
        .fold(1.0f64, |acc, e| acc.max(e.abs()));
    let tol = CLUSTER_TOLERANCE * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            rotate_block(vectors, start, end, nonzeros);
        }
        start = end;
    }
}

fn rotate_block(vectors: &mut Mat<c64>, start: usize, end: usize, nonzeros: &[Triplet]) {
    let n = vectors.nrows();
    let k = end - start;
    let block = vectors.as_ref().subcols(start, k);
    let applied: Vec<Vec<c64>> = (0..k)
        .map(|b| bond_current_apply(nonzeros, n, block.col(b)))
        .collect();
    let sub = Mat::<c64>::from_fn(k, k, |a, b| {
        block
            .col(a)
            .iter()
            .zip(applied[b].iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    });
    // symmetrize away rounding so the small solve sees an exactly Hermitian block
    let sub = Mat::<c64>::from_fn(k, k, |a, b| (sub[(a, b)] + sub[(b, a)].conj()) * 0.5);

    let mut values = Diag::<c64>::zeros(k);
    let mut w = Mat::<c64>::zeros(k, k);
    let scratch =
        evd::self_adjoint_evd_scratch::<c64>(k, ComputeEigenvectors::Yes, Par::Seq, Default::default());
    let mut buf = MemBuffer::new(scratch);
    if evd::self_adjoint_evd(
        sub.as_ref(),
        values.as_mut(),
        Some(w.as_mut()),
        Par::Seq,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .is_err()
    {
        return;
    }
    let currents: Vec<f64> = values.column_vector().iter().map(|z| z.re).collect();
    let min_split = currents
        .windows(2)
        .map(|p| p[1] - p[0])
        .fold(f64::INFINITY, f64::min);
    if !(min_split > CURRENT_SPLIT_TOLERANCE) {
        return;
    }
    let rotated = block * w.as_ref();
    vectors.as_mut().subcols_mut(start, k).copy_from(rotated.as_ref());
}
