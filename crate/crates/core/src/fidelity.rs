//! Ground-state fidelity, the perturbative metric tensor and fidelity susceptibility.
//!
//! The susceptibility along a unit direction `(n_λ, n_μ)` is the quadratic form
//! `χ_F = Σ_ab g_ab n^a n^b` with
//!
//! ```text
//! g_ab = Re Σ_{γ≠0} ⟨Ψ_γ|H_a|Ψ_0⟩⟨Ψ_0|H_b|Ψ_γ⟩ / (E_γ - E_0)²
//! ```
//!
//! and must agree with the limit `-2 ln F / δq²`; [`fs_finite_difference`] is
//! that independent route.

use faer::c64;

use crate::error::{invalid, Error, Result};
use crate::model::{build_driving, DrivingKind, ModelPoint};
use crate::spectrum::{ground_state, solve, EigenSystem, GroundState, DEGENERACY_TOLERANCE};

/// Default parameter step of the finite-difference susceptibility.
pub const DEFAULT_DQ: f64 = 1e-4;

/// Unit tangent `(n_λ, n_μ)` of a path through the coupling plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    n_lambda: f64,
    n_mu: f64,
}

impl Direction {
    pub const LAMBDA: Direction = Direction { n_lambda: 1.0, n_mu: 0.0 };
    pub const MU: Direction = Direction { n_lambda: 0.0, n_mu: 1.0 };

    /// Accepts components whose squared norm is 1 within `1e-12`.
    pub fn new(n_lambda: f64, n_mu: f64) -> Result<Self> {
        let norm2 = n_lambda * n_lambda + n_mu * n_mu;
        if !norm2.is_finite() || (norm2 - 1.0).abs() > 1e-12 {
            return Err(invalid(format!(
                "direction ({n_lambda}, {n_mu}) is not a unit vector"
            )));
        }
        Ok(Self { n_lambda, n_mu })
    }

    /// Rescales any nonzero vector to unit length.
    pub fn normalized(n_lambda: f64, n_mu: f64) -> Result<Self> {
        let norm = n_lambda.hypot(n_mu);
        if !norm.is_finite() || norm == 0.0 {
            return Err(invalid(format!(
                "direction ({n_lambda}, {n_mu}) cannot be normalized"
            )));
        }
        Ok(Self { n_lambda: n_lambda / norm, n_mu: n_mu / norm })
    }

    pub fn n_lambda(&self) -> f64 {
        self.n_lambda
    }

    pub fn n_mu(&self) -> f64 {
        self.n_mu
    }

    pub fn reversed(&self) -> Self {
        Self { n_lambda: -self.n_lambda, n_mu: -self.n_mu }
    }

    fn components(&self) -> [f64; 2] {
        [self.n_lambda, self.n_mu]
    }
}

/// Real symmetric metric `g_ab` over `a, b ∈ {λ, μ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricTensor {
    pub g: [[f64; 2]; 2],
    /// False when a level within `DEGENERACY_TOLERANCE` of the ground state was dropped.
    pub reliable: bool,
}

impl MetricTensor {
    pub fn lambda_lambda(&self) -> f64 {
        self.g[0][0]
    }

    pub fn mu_mu(&self) -> f64 {
        self.g[1][1]
    }

    pub fn lambda_mu(&self) -> f64 {
        self.g[0][1]
    }

    pub fn determinant(&self) -> f64 {
        self.g[0][0] * self.g[1][1] - self.g[0][1] * self.g[1][0]
    }
}

/// `|⟨a|b⟩|`, clamped to `[0, 1]`.
pub fn overlap_modulus(a: &[c64], b: &[c64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid(format!(
            "states have different lengths ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let inner: c64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    Ok(inner.norm().min(1.0))
}

/// Ground-state fidelity `F = |⟨Ψ_0(a)|Ψ_0(b)⟩|`.
pub fn fidelity(a: &GroundState, b: &GroundState) -> Result<f64> {
    overlap_modulus(&a.amplitudes, &b.amplitudes)
}

/// Sum-over-states metric at `p`; `es` must be the spectrum of `build_hamiltonian(p)`.
pub fn metric_tensor(p: &ModelPoint, es: &EigenSystem) -> Result<MetricTensor> {
    let n = es.len();
    if n < 2 {
        return Err(invalid("metric tensor needs at least two levels"));
    }
    if n != p.size() {
        return Err(invalid(format!(
            "eigensystem has {n} levels but the model point has {} sites",
            p.size()
        )));
    }
    let ground: Vec<c64> = es.eigenvector(0).iter().copied().collect();
    let driven = [
        build_driving(p, DrivingKind::Lambda).apply(&ground),
        build_driving(p, DrivingKind::Mu).apply(&ground),
    ];
    let e0 = es.eigenvalues()[0];
    let mut sum = [[c64::new(0.0, 0.0); 2]; 2];
    let mut reliable = true;
    for gamma in 1..n {
        let de = es.eigenvalues()[gamma] - e0;
        if de < DEGENERACY_TOLERANCE {
            reliable = false;
            continue;
        }
        let v = es.eigenvector(gamma);
        let elems = driven.each_ref().map(|hv| -> c64 {
            v.iter().zip(hv).map(|(x, y)| x.conj() * y).sum()
        });
        let w = 1.0 / (de * de);
        for a in 0..2 {
            for b in 0..2 {
                sum[a][b] += elems[a] * elems[b].conj() * w;
            }
        }
    }
    let off = 0.5 * (sum[0][1].re + sum[1][0].re);
    Ok(MetricTensor {
        g: [[sum[0][0].re, off], [off, sum[1][1].re]],
        reliable,
    })
}

/// `χ_F = Σ g_ab n^a n^b`; small negative rounding is clamped to zero.
pub fn fidelity_susceptibility(g: &MetricTensor, d: Direction) -> f64 {
    let n = d.components();
    let mut chi = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            chi += g.g[a][b] * n[a] * n[b];
        }
    }
    let scale = g.g[0][0].abs() + g.g[1][1].abs();
    if chi < 0.0 && chi >= -1e-10 * scale {
        0.0
    } else {
        chi
    }
}

/// Susceptibility at one point with its reliability flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Susceptibility {
    pub chi: f64,
    pub reliable: bool,
}

/// Diagonalizes at `p` and evaluates `χ_F` along `d`.
pub fn susceptibility_at(p: &ModelPoint, d: Direction) -> Result<Susceptibility> {
    let es = solve(p)?;
    let g = metric_tensor(p, &es)?;
    Ok(Susceptibility {
        chi: fidelity_susceptibility(&g, d),
        reliable: g.reliable,
    })
}

/// `-2 ln F / δq²` from the ground states at `p ∓ (δq/2) d`; converges to
/// `χ_F(p)` as `O(δq²)`.
pub fn fs_finite_difference(p: &ModelPoint, d: Direction, dq: f64) -> Result<f64> {
    if !(1e-6..=1e-2).contains(&dq) {
        return Err(invalid(format!("dq must lie in [1e-6, 1e-2] (got {dq})")));
    }
    let half = 0.5 * dq;
    let below = p.displaced(d.n_lambda, d.n_mu, -half)?;
    let above = p.displaced(d.n_lambda, d.n_mu, half)?;
    let a = ground_state(&solve(&below)?)?;
    let b = ground_state(&solve(&above)?)?;
    let f = fidelity(&a, &b)?;
    if !(f > f64::MIN_POSITIVE) {
        return Err(Error::Computation {
            message: "ground states are orthogonal; ln F diverges".into(),
            residual: f,
        });
    }
    Ok(-2.0 * f.ln() / (dq * dq))
}
