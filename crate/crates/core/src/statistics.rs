//! Reduced pump state, purity, entropy and pump photon statistics.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::coherent::{coherent_state, CoherentParams, MultiBlockState};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::special::omega;
use crate::subspace::{BlockState, SubspaceLabel};

/// Density matrix over pump Fock levels `0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpDensity {
    pub matrix: Vec<Vec<Complex64>>,
}

impl PumpDensity {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.iter().enumerate().map(|(i, row)| row[i].re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().flatten().map(|x| x.norm_sqr()).sum()
    }

    /// `1 − Tr ρ²`.
    pub fn purity_parameter(&self) -> f64 {
        1.0 - self.purity()
    }

    /// Ascending eigenvalues, with values in `[−1e−12, 0)` set to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let values = hermitian_eigen(&self.matrix)?.values;
        values
            .into_iter()
            .map(|v| match v {
                v if v >= 0.0 => Ok(v),
                v if v >= -1e-12 => Ok(0.0),
                v => Err(Error::domain(format!("density matrix has eigenvalue {v:e} < 0"))),
            })
            .collect()
    }

    /// `Σ n ρ_nn`.
    pub fn mean_level(&self) -> f64 {
        self.matrix.iter().enumerate().map(|(n, row)| n as f64 * row[n].re).sum()
    }
}

/// Joint amplitude `Ψ[n][m]` over pump level `n` and signal-idler level
/// `m`. Blocks with the same `k` share the signal-idler states `|k, m⟩`.
fn joint_amplitudes(state: &MultiBlockState) -> Result<Vec<Vec<Complex64>>> {
    let first = state
        .entries
        .first()
        .ok_or_else(|| Error::domain("empty superposition"))?;
    let k = first.state.label.k;
    if let Some(e) = state.entries.iter().find(|e| e.state.label.k != k) {
        return Err(Error::domain(format!(
            "reduction of superpositions with different k ({} and {}) is not supported",
            k, e.state.label.k
        )));
    }
    let dim = state.entries.iter().map(|e| e.state.label.dim()).max().unwrap_or(1);
    let mut psi = vec![vec![Complex64::zero(); dim]; dim];
    for e in &state.entries {
        let l = e.state.label.l;
        for (n, a) in e.state.amp.iter().enumerate() {
            psi[n][l - n] += e.weight * a;
        }
    }
    Ok(psi)
}

fn gram_rows(psi: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    psi.iter()
        .map(|ri| psi.iter().map(|rj| ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum()).collect())
        .collect()
}

fn transpose(psi: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let (rows, cols) = (psi.len(), psi.first().map_or(0, Vec::len));
    (0..cols).map(|j| (0..rows).map(|i| psi[i][j]).collect()).collect()
}

/// States whose pump marginal can be taken.
pub trait PumpReducible {
    fn reduce_pump(&self) -> Result<PumpDensity>;
    /// Reduced state of the signal-idler pair over levels `|k, m⟩`.
    fn reduce_signal_idler(&self) -> Result<PumpDensity>;
}

impl PumpReducible for BlockState {
    fn reduce_pump(&self) -> Result<PumpDensity> {
        let dim = self.label.dim();
        let mut matrix = vec![vec![Complex64::zero(); dim]; dim];
        for (n, a) in self.amp.iter().enumerate() {
            matrix[n][n] = Complex64::new(a.norm_sqr(), 0.0);
        }
        Ok(PumpDensity { matrix })
    }

    fn reduce_signal_idler(&self) -> Result<PumpDensity> {
        let dim = self.label.dim();
        let mut matrix = vec![vec![Complex64::zero(); dim]; dim];
        for (n, a) in self.amp.iter().enumerate() {
            let m = self.label.l - n;
            matrix[m][m] = Complex64::new(a.norm_sqr(), 0.0);
        }
        Ok(PumpDensity { matrix })
    }
}

impl PumpReducible for MultiBlockState {
    fn reduce_pump(&self) -> Result<PumpDensity> {
        Ok(PumpDensity { matrix: gram_rows(&joint_amplitudes(self)?) })
    }

    fn reduce_signal_idler(&self) -> Result<PumpDensity> {
        let psi_t = transpose(&joint_amplitudes(self)?);
        // ρ_bc[m][m'] = Σ_n Ψ[n][m] Ψ[n][m']*
        Ok(PumpDensity { matrix: gram_rows(&psi_t) })
    }
}

pub fn reduce_pump<S: PumpReducible>(state: &S) -> Result<PumpDensity> {
    state.reduce_pump()
}

pub fn purity_parameter<S: PumpReducible>(state: &S) -> Result<f64> {
    Ok(state.reduce_pump()?.purity_parameter())
}

/// `−Σ λ ln λ` over the spectrum of `ρ`, with `0 ln 0 = 0`.
pub fn entropy_vn(rho: &PumpDensity) -> Result<f64> {
    Ok(rho
        .eigenvalues()?
        .into_iter()
        .filter(|&v| v > 0.0)
        .map(|v| -v * v.ln())
        .sum())
}

/// `I = S_a + S_bc − S = 2 S_a` for a pure three-mode state.
pub fn index_of_correlation<S: PumpReducible>(state: &S) -> Result<f64> {
    Ok(2.0 * entropy_vn(&state.reduce_pump()?)?)
}

/// `P_a(n) = |amp[n]|²` of the coherent state.
pub fn photon_distribution(params: &CoherentParams) -> Vec<f64> {
    coherent_state(params).amp.iter().map(|a| a.norm_sqr()).collect()
}

/// Pump mean and variance from `Ω`, with `r = |y|² = |z|⁻²`:
/// `⟨N_a⟩ = rΩ`, `⟨ΔN_a²⟩ = [r² + (2k+L)r]Ω − r²Ω² − Lr`.
///
/// The variance expression cancels heavily once `r ≫ 1`; use
/// [`number_moments_direct`] where that matters.
pub fn number_moments(r: f64, label: SubspaceLabel) -> Result<(f64, f64)> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("number moments need r ≥ 0, got {r}")));
    }
    let k = label.k.value();
    let l = label.l as f64;
    let om = omega(r, k, label.l)?;
    let mean = r * om;
    let var = (r * r + (2.0 * k + l) * r) * om - r * r * om * om - l * r;
    Ok((mean, var))
}

/// Mean and variance of `N_a` summed over the coherent-state amplitudes.
pub fn number_moments_direct(params: &CoherentParams) -> (f64, f64) {
    let p = photon_distribution(params);
    let mean: f64 = p.iter().enumerate().map(|(n, q)| n as f64 * q).sum();
    let second: f64 = p.iter().enumerate().map(|(n, q)| (n * n) as f64 * q).sum();
    (mean, (second - mean * mean).max(0.0))
}

/// `⟨K₀⟩ = k + L − ⟨N_a⟩` and `⟨ΔK₀²⟩ = ⟨ΔN_a²⟩`.
pub fn k0_moments(r: f64, label: SubspaceLabel) -> Result<(f64, f64)> {
    let (mean, var) = number_moments(r, label)?;
    Ok((label.k.value() + label.l as f64 - mean, var))
}

/// Small-`|z|` purity `4kL|z|²`.
pub fn purity_small_z(label: SubspaceLabel, z_abs: f64) -> f64 {
    4.0 * label.k.value() * label.l as f64 * z_abs * z_abs
}

/// Large-`|z|` purity `2L/(2k+L−1) |z|⁻²`.
pub fn purity_large_z(label: SubspaceLabel, z_abs: f64) -> f64 {
    let l = label.l as f64;
    2.0 * l / (label.k.twice() + l - 1.0) / (z_abs * z_abs)
}

/// Large-`|z|` mean and variance `L|z|⁻²/(L+2k−1)`.
pub fn number_large_z(label: SubspaceLabel, z_abs: f64) -> f64 {
    let l = label.l as f64;
    l / (z_abs * z_abs) / (l + label.k.twice() - 1.0)
}

/// Purity parameter of `|z;k,L⟩` for each `|z|` (real positive `z`).
pub fn purity_curve(label: SubspaceLabel, z_abs: &[f64]) -> Vec<f64> {
    z_abs
        .par_iter()
        .map(|&z| {
            let p = photon_distribution(&CoherentParams::new(label, Complex64::new(z, 0.0)));
            1.0 - p.iter().map(|q| q * q).sum::<f64>()
        })
        .collect()
}

/// Direct-sum `(mean, variance)` of `N_a` for each `|z|`.
pub fn number_stats_curve(label: SubspaceLabel, z_abs: &[f64]) -> Vec<(f64, f64)> {
    z_abs
        .par_iter()
        .map(|&z| number_moments_direct(&CoherentParams::new(label, Complex64::new(z, 0.0))))
        .collect()
}
