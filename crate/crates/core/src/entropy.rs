//! Single-site von Neumann entropies and the inverse participation ratio.
//!
//! For one particle in state `ψ` the reduced density matrix of site `n` is
//! diagonal with occupation `z_n = |ψ_n|²`, so its entropy is the binary
//! entropy `-z log₂ z - (1-z) log₂(1-z)`. Site averages are reported scaled by
//! `(1/N) log₂ N`, which maps a uniform state to roughly 1 and a site-localized
//! state to 0. Per-site values stay in raw bits.
//!
//! `ipr = Σ z_n²` here: `1/N` for a uniform state and `1` for a delta state.

use faer::c64;

use crate::error::{invalid, Result};
use crate::spectrum::EigenSystem;

/// Allowed deviation of `‖ψ‖²` from one.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyProfile {
    /// Binary entropy of each site occupation, in bits.
    pub site_entropies: Vec<f64>,
    /// Site-averaged entropy divided by `(1/N) log₂ N`.
    pub state_entropy_scaled: f64,
    pub ipr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntropy {
    /// Mean scaled entropy over all eigenstates.
    pub value: f64,
    pub count: usize,
}

/// `-z log₂ z - (1-z) log₂(1-z)` with `0 log 0 = 0`.
pub fn binary_entropy(z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(z) + term(1.0 - z)
}

/// Scaled entropy of the uniform state `ψ_n = 1/√N`.
pub fn uniform_state_entropy(n: usize) -> f64 {
    let nf = n as f64;
    binary_entropy(1.0 / nf) * nf / nf.log2()
}

fn profile_from_occupations(z: impl Iterator<Item = f64>, n: usize) -> EntropyProfile {
    let mut site_entropies = Vec::with_capacity(n);
    let mut total = 0.0;
    let mut ipr = 0.0;
    for zn in z {
        let s = binary_entropy(zn);
        total += s;
        ipr += zn * zn;
        site_entropies.push(s);
    }
    EntropyProfile {
        site_entropies,
        state_entropy_scaled: total / (n as f64).log2(),
        ipr,
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!(
            "entropy scaling needs at least two sites (got {n})"
        )));
    }
    Ok(())
}

/// Entropy profile of a normalized state.
pub fn entropy_profile(state: &[c64]) -> Result<EntropyProfile> {
    let n = state.len();
    check_size(n)?;
    let norm2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > NORM_TOLERANCE {
        return Err(invalid(format!("state is not normalized (‖ψ‖² = {norm2})")));
    }
    Ok(profile_from_occupations(state.iter().map(|z| z.norm_sqr()), n))
}

/// Entropy profile from occupation probabilities `z_n` summing to one.
pub fn occupation_profile(z: &[f64]) -> Result<EntropyProfile> {
    check_size(z.len())?;
    let total: f64 = z.iter().sum();
    if (total - 1.0).abs() > NORM_TOLERANCE || z.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(invalid("occupations must be probabilities summing to one"));
    }
    Ok(profile_from_occupations(z.iter().copied(), z.len()))
}

fn state_profile(es: &EigenSystem, gamma: usize) -> EntropyProfile {
    profile_from_occupations(es.eigenvector(gamma).iter().map(|z| z.norm_sqr()), es.len())
}

/// Scaled entropy of every eigenstate, in eigenvalue order.
pub fn state_entropies(es: &EigenSystem) -> Result<Vec<f64>> {
    check_size(es.len())?;
    Ok((0..es.len()).map(|g| state_profile(es, g).state_entropy_scaled).collect())
}

/// IPR of every eigenstate, in eigenvalue order.
pub fn state_iprs(es: &EigenSystem) -> Result<Vec<f64>> {
    check_size(es.len())?;
    Ok((0..es.len()).map(|g| state_profile(es, g).ipr).collect())
}

/// Spectrum-averaged scaled entropy `⟨E_v⟩`.
pub fn spectrum_entropy(es: &EigenSystem) -> Result<SpectrumEntropy> {
    let values = state_entropies(es)?;
    let count = values.len();
    Ok(SpectrumEntropy {
        value: values.iter().sum::<f64>() / count as f64,
        count,
    })
}

/// `(E_γ, E_v^γ)` pairs in ascending energy.
pub fn entropy_vs_energy(es: &EigenSystem) -> Result<Vec<(f64, f64)>> {
    let values = state_entropies(es)?;
    Ok(es.eigenvalues().iter().copied().zip(values).collect())
}

/// Spearman rank correlation; ties get their average rank.
pub fn rank_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("rank correlation needs two equal-length samples"));
    }
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(invalid("rank correlation of a constant sample"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_entropy_limits() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn delta_state_has_zero_entropy() {
        let mut psi = vec![c64::new(0.0, 0.0); 34];
        psi[7] = c64::new(0.0, 1.0);
        let p = entropy_profile(&psi).unwrap();
        assert_eq!(p.state_entropy_scaled, 0.0);
        assert_eq!(p.ipr, 1.0);
    }

    #[test]
    fn uniform_state_matches_closed_form() {
        for n in [2usize, 13, 987] {
            let a = 1.0 / (n as f64).sqrt();
            let psi = vec![c64::new(a, 0.0); n];
            let p = entropy_profile(&psi).unwrap();
            assert!((p.state_entropy_scaled - uniform_state_entropy(n)).abs() < 1e-12);
            assert!((p.ipr - 1.0 / n as f64).abs() < 1e-15);
        }
        assert!(uniform_state_entropy(987) > 1.0);
        assert!(uniform_state_entropy(987) < 1.2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(entropy_profile(&[c64::new(1.0, 0.0)]).is_err());
        assert!(entropy_profile(&[c64::new(1.0, 0.0), c64::new(0.1, 0.0)]).is_err());
        assert!(occupation_profile(&[0.7, 0.7]).is_err());
    }

    #[test]
    fn spearman_basics() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((rank_correlation(&x, &[10.0, 20.0, 30.0, 40.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((rank_correlation(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!(rank_correlation(&x, &[1.0, 1.0, 1.0, 1.0]).is_err());
        assert_eq!(ranks(&[3.0, 1.0, 3.0]), vec![1.5, 0.0, 1.5]);
    }
}
