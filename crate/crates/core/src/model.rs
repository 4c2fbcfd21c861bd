//! Extended Harper Hamiltonian on a Fibonacci approximant.
//!
//! With `t_a` as the unit of energy, `λ = 2 t_b / t_a` and `μ = t_c / t_a`, the
//! single-particle eigenvalue equation reads
//!
//! ```text
//! -[1 + μ e^{-2πiφ(n-1/2) + i k_y}] ψ_{n-1}
//! -[1 + μ e^{ 2πiφ(n+1/2) - i k_y}] ψ_{n+1}
//! - λ cos(2πφn + k_y) ψ_n = E ψ_n
//! ```
//!
//! The flux is the rational approximant `φ = F_{m-1} / F_m` on a chain of
//! `N = F_m` sites, `n = 0, …, N-1`. Phases are reduced with integer
//! arithmetic before any trigonometry so that quarter turns, and in particular
//! the broken bond `1 + e^{iπ} = 0`, come out exact.

use std::f64::consts::TAU;

use faer::{c64, Mat, MatRef};

use crate::error::{invalid, Error, Result};

/// Hopping magnitude below which a bond counts as broken.
pub const ZERO_BOND_TOLERANCE: f64 = 1e-12;

/// Rational flux `F_{m-1}/F_m` together with the system size `N = F_m`.
///
/// Uses `F_0 = F_1 = 1`, so `m = 15` gives `N = 987`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FibonacciApproximant {
    index: u32,
    size: usize,
    numerator: usize,
}

impl FibonacciApproximant {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(invalid(format!(
                "Fibonacci index must be at least 2 (got {m})"
            )));
        }
        let (mut prev, mut cur) = (1u64, 1u64);
        for _ in 1..m {
            let next = prev
                .checked_add(cur)
                .ok_or_else(|| Error::Range(format!("F_{m} overflows 64 bits")))?;
            prev = cur;
            cur = next;
        }
        let size = usize::try_from(cur)
            .map_err(|_| Error::Range(format!("F_{m} does not fit in usize")))?;
        let numerator = usize::try_from(prev)
            .map_err(|_| Error::Range(format!("F_{} does not fit in usize", m - 1)))?;
        Ok(Self { index: m, size, numerator })
    }

    /// Smallest approximant with at least `n` sites.
    pub fn at_least(n: usize) -> Result<Self> {
        let mut m = 2;
        loop {
            let a = Self::new(m)?;
            if a.size >= n {
                return Ok(a);
            }
            m += 1;
        }
    }

    /// Fibonacci index `m`.
    pub fn index(&self) -> u32 {
        self.index
    }

    /// System size `N = F_m`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Flux numerator `F_{m-1}`.
    pub fn numerator(&self) -> usize {
        self.numerator
    }

    /// `m mod 3`; residue 1 marks the sizes where the bond at `(N-1)/2` breaks at `μ = 1`.
    pub fn residue(&self) -> u8 {
        (self.index % 3) as u8
    }

    pub fn flux(&self) -> f64 {
        self.numerator as f64 / self.size as f64
    }
}

pub fn fibonacci_approximant(m: u32) -> Result<FibonacciApproximant> {
    FibonacciApproximant::new(m)
}

/// How the chain is closed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Open chain: no bond between sites `N-1` and `0`.
    #[default]
    Open,
    /// Ring: the bond formula at `n = N-1` couples site `N-1` to site `0`.
    Periodic,
}

impl Boundary {
    /// Number of bonds `n -> n+1` carried by a chain of `size` sites.
    pub fn bond_count(self, size: usize) -> usize {
        match self {
            Boundary::Open => size.saturating_sub(1),
            Boundary::Periodic => size,
        }
    }
}

/// One point of the extended Harper model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelPoint {
    lambda: f64,
    mu: f64,
    k_y: f64,
    approximant: FibonacciApproximant,
    boundary: Boundary,
}

impl ModelPoint {
    /// Point with `k_y = 0` and open boundaries.
    pub fn new(lambda: f64, mu: f64, approximant: FibonacciApproximant) -> Result<Self> {
        check_coupling("lambda", lambda)?;
        check_coupling("mu", mu)?;
        Ok(Self {
            lambda,
            mu,
            k_y: 0.0,
            approximant,
            boundary: Boundary::default(),
        })
    }

    /// Transverse momentum, reduced into `[0, 2π)`.
    pub fn with_ky(mut self, k_y: f64) -> Result<Self> {
        if !k_y.is_finite() {
            return Err(invalid(format!("k_y must be finite (got {k_y})")));
        }
        self.k_y = k_y.rem_euclid(TAU);
        Ok(self)
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Same approximant, `k_y` and boundary at different couplings.
    pub fn with_couplings(&self, lambda: f64, mu: f64) -> Result<Self> {
        check_coupling("lambda", lambda)?;
        check_coupling("mu", mu)?;
        Ok(Self { lambda, mu, ..*self })
    }

    /// Moves by `t · (n_λ, n_μ)` in the coupling plane.
    pub fn displaced(&self, n_lambda: f64, n_mu: f64, t: f64) -> Result<Self> {
        self.with_couplings(self.lambda + t * n_lambda, self.mu + t * n_mu)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn k_y(&self) -> f64 {
        self.k_y
    }

    pub fn approximant(&self) -> FibonacciApproximant {
        self.approximant
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn size(&self) -> usize {
        self.approximant.size
    }

    /// `cos(2πφn + k_y)`.
    fn onsite_cos(&self, n: usize) -> f64 {
        let a = &self.approximant;
        let turns = (a.numerator as u128 * n as u128 % a.size as u128) as u64;
        phase(turns, a.size as u64, -self.k_y).re
    }

    /// `e^{2πiφ(n+1/2) - i k_y}`.
    fn bond_phase(&self, n: usize) -> c64 {
        let a = &self.approximant;
        let den = 2 * a.size as u128;
        let turns = (a.numerator as u128 * (2 * n as u128 + 1) % den) as u64;
        phase(turns, den as u64, self.k_y)
    }
}

fn check_coupling(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(invalid(format!(
            "{name} must be finite and non-negative (got {value})"
        )));
    }
    Ok(())
}

/// `e^{i(2π k/d - shift)}`, exact at quarter turns when `shift == 0`.
fn phase(k: u64, d: u64, shift: f64) -> c64 {
    let k = k % d;
    if shift == 0.0 && (4 * k as u128).is_multiple_of(d as u128) {
        return match (4 * k as u128 / d as u128) as u8 {
            0 => c64::new(1.0, 0.0),
            1 => c64::new(0.0, 1.0),
            2 => c64::new(-1.0, 0.0),
            _ => c64::new(0.0, -1.0),
        };
    }
    let angle = TAU * (k as f64 / d as f64) - shift;
    c64::new(angle.cos(), angle.sin())
}

/// The parameter derivatives of the Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DrivingKind {
    /// `H_λ = -Σ cos(2πφn + k_y) |n⟩⟨n|`
    Lambda,
    /// `H_μ = -Σ e^{2πiφ(n+1/2) - i k_y} |n⟩⟨n+1| + h.c.`
    Mu,
}

/// Dense Hermitian matrix in units of `t_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    entries: Mat<c64>,
}

impl HamiltonianMatrix {
    /// Wraps an arbitrary square matrix. Hermiticity is not checked here;
    /// `diagonalize` rejects non-Hermitian input.
    pub fn from_dense(entries: Mat<c64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(invalid(format!(
                "matrix must be square and non-empty (got {}x{})",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn from_fn(size: usize, f: impl FnMut(usize, usize) -> c64) -> Result<Self> {
        Self::from_dense(Mat::from_fn(size, size, f))
    }

    fn zeros(size: usize) -> Self {
        Self { entries: Mat::zeros(size, size) }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.entries[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: c64) {
        self.entries[(i, j)] = value;
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.entries.as_ref()
    }

    /// Largest `|H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in j..n {
                let d = self.entries[(i, j)] - self.entries[(j, i)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() == 0.0
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.size() {
            for i in 0..self.size() {
                worst = worst.max(self.entries[(i, j)].norm());
            }
        }
        worst
    }

    /// Number of nonzero entries in row `i`.
    pub fn row_nonzeros(&self, i: usize) -> usize {
        (0..self.size())
            .filter(|&j| self.entries[(i, j)] != c64::new(0.0, 0.0))
            .count()
    }

    pub fn trace(&self) -> c64 {
        (0..self.size()).map(|i| self.entries[(i, i)]).sum()
    }

    /// `H v`.
    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        let n = self.size();
        assert_eq!(v.len(), n, "vector length must match the matrix size");
        let mut out = vec![c64::new(0.0, 0.0); n];
        for (j, &vj) in v.iter().enumerate() {
            if vj == c64::new(0.0, 0.0) {
                continue;
            }
            let col = self.entries.col(j);
            for (o, &h) in out.iter_mut().zip(col.iter()) {
                *o += h * vj;
            }
        }
        out
    }

    /// Adds `t` on bond `i -> j` and its conjugate on `j -> i`.
    fn add_bond(&mut self, i: usize, j: usize, t: c64) {
        self.entries[(i, j)] += t;
        self.entries[(j, i)] += t.conj();
    }
}

/// Builds `H(λ, μ)` for the point's approximant, `k_y` and boundary.
pub fn build_hamiltonian(p: &ModelPoint) -> HamiltonianMatrix {
    let n = p.size();
    let mut h = HamiltonianMatrix::zeros(n);
    for site in 0..n {
        h.set(site, site, c64::new(-p.lambda * p.onsite_cos(site), 0.0));
    }
    for bond in 0..p.boundary.bond_count(n) {
        let t = -(c64::new(1.0, 0.0) + p.bond_phase(bond) * p.mu);
        h.add_bond(bond, (bond + 1) % n, t);
    }
    h
}

/// Builds `∂H/∂λ` or `∂H/∂μ`; `H(λ, μ) = H(0, 0) + λ H_λ + μ H_μ` holds entrywise.
pub fn build_driving(p: &ModelPoint, kind: DrivingKind) -> HamiltonianMatrix {
    let n = p.size();
    let mut h = HamiltonianMatrix::zeros(n);
    match kind {
        DrivingKind::Lambda => {
            for site in 0..n {
                h.set(site, site, c64::new(-p.onsite_cos(site), 0.0));
            }
        }
        DrivingKind::Mu => {
            for bond in 0..p.boundary.bond_count(n) {
                h.add_bond(bond, (bond + 1) % n, -p.bond_phase(bond));
            }
        }
    }
    h
}

/// First bond `n -> n+1` whose hopping `1 + μ e^{2πiφ(n+1/2) - i k_y}` vanishes.
pub fn zero_bond_site(p: &ModelPoint) -> Option<usize> {
    (0..p.boundary.bond_count(p.size())).find(|&bond| {
        (c64::new(1.0, 0.0) + p.bond_phase(bond) * p.mu).norm() < ZERO_BOND_TOLERANCE
    })
}
