//! Time evolution inside a block under `H_int = κ aK₊ + κ* a†K₋`.
//!
//! The block matrix is Hermitian tridiagonal with zero diagonal, so the
//! propagator is built from its full eigensystem. All closed forms here use
//! `κ = i|κ|`, for which `z = −iκt = |κ|t` is real.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coherent::{coherent_state, CoherentParams};
use crate::error::{Error, Result};
use crate::linalg::hermitian_tridiagonal_eigen;
use crate::subspace::{interaction_matrix, BlockState, SubspaceLabel, TridiagMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub label: SubspaceLabel,
    pub kappa: Complex64,
    /// Pump frequency `ω_a`; the signal and idler sit at `ω_a/2`.
    pub omega_a: f64,
    /// Multiply by the free phase `e^{−iω_a(k+L)t}`.
    pub include_free_phase: bool,
}

impl EvolutionConfig {
    pub fn new(label: SubspaceLabel, kappa: Complex64) -> Self {
        EvolutionConfig { label, kappa, omega_a: 0.0, include_free_phase: false }
    }

    /// `κ = i|κ|`.
    pub fn resonant(label: SubspaceLabel, kappa_abs: f64) -> Self {
        Self::new(label, Complex64::new(0.0, kappa_abs))
    }
}

/// Spectral decomposition of the block interaction matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub config: EvolutionConfig,
    /// Ascending eigenvalues `ν`.
    pub values: Vec<f64>,
    pub vectors: Vec<BlockState>,
    matrix: TridiagMatrix,
}

impl EigenSystem {
    /// `max_ν ‖H v − ν v‖`.
    pub fn max_residual(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(nu, v)| {
                self.matrix
                    .apply(&v.amp)
                    .iter()
                    .zip(&v.amp)
                    .map(|(hv, x)| (hv - nu * x).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn matrix_norm(&self) -> f64 {
        self.matrix.norm_inf()
    }

    /// Coefficients `⟨v_ν|ψ⟩`.
    fn project(&self, state: &BlockState) -> Result<Vec<Complex64>> {
        self.vectors.iter().map(|v| v.inner(state)).collect()
    }

    fn assemble(&self, coeff: &[Complex64], t: f64) -> BlockState {
        let mut out = BlockState::zero(self.config.label);
        for ((nu, v), c) in self.values.iter().zip(&self.vectors).zip(coeff) {
            let w = c * Complex64::from_polar(1.0, -nu * t);
            for (o, x) in out.amp.iter_mut().zip(&v.amp) {
                *o += w * x;
            }
        }
        if self.config.include_free_phase {
            let cfg = &self.config;
            let phase = -cfg.omega_a * (cfg.label.k.value() + cfg.label.l as f64) * t;
            out = out.scaled(Complex64::from_polar(1.0, phase));
        }
        out
    }

    /// `Σ_ν e^{−iνt} v_ν ⟨v_ν|ψ₀⟩`.
    pub fn evolve(&self, state0: &BlockState, t: f64) -> Result<BlockState> {
        self.config.label.check_same(&state0.label)?;
        Ok(self.assemble(&self.project(state0)?, t))
    }
}

pub fn eigensystem(cfg: &EvolutionConfig) -> Result<EigenSystem> {
    let matrix = interaction_matrix(cfg.label, cfg.kappa)?;
    let eig = hermitian_tridiagonal_eigen(&matrix.diag, &matrix.sub)?;
    let vectors = eig
        .vectors
        .into_iter()
        .map(|v| BlockState::from_amplitudes(cfg.label, v))
        .collect::<Result<Vec<_>>>()?;
    let sys = EigenSystem { config: *cfg, values: eig.values, vectors, matrix };
    let res = sys.max_residual();
    if res > 1e-10 * sys.matrix_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence { what: "block eigensystem", iterations: 0, partial: res });
    }
    Ok(sys)
}

pub fn evolve(state0: &BlockState, t: f64, cfg: &EvolutionConfig) -> Result<BlockState> {
    eigensystem(cfg)?.evolve(state0, t)
}

/// `λ₁ = √(2k)|κ|`.
pub fn lambda1(k: f64, kappa_abs: f64) -> f64 {
    (2.0 * k).sqrt() * kappa_abs
}

/// `λ₂ = ½√(8k+2)|κ|`.
pub fn lambda2(k: f64, kappa_abs: f64) -> f64 {
    0.5 * (8.0 * k + 2.0).sqrt() * kappa_abs
}

/// `e^{−iH_int t}|L⟩|k,0⟩` for `L ∈ {1, 2}` and `κ = i|κ|`.
pub fn closed_form(label: SubspaceLabel, t: f64, kappa_abs: f64) -> Result<BlockState> {
    let k = label.k.value();
    let c = |x: f64| Complex64::new(x, 0.0);
    let amp = match label.l {
        1 => {
            let x = lambda1(k, kappa_abs) * t;
            vec![c(x.sin()), c(x.cos())]
        }
        2 => {
            let x = lambda2(k, kappa_abs) * t;
            let d = 4.0 * k + 1.0;
            vec![
                c((8.0 * k * (2.0 * k + 1.0)).sqrt() * x.sin().powi(2) / d),
                c((2.0 * k * d).sqrt() * (2.0 * x).sin() / d),
                c((1.0 + 4.0 * k * x.cos().powi(2)) / d),
            ]
        }
        l => return Err(Error::domain(format!("closed form exists only for L = 1, 2, got L = {l}"))),
    };
    BlockState::from_amplitudes(label, amp)
}

fn mean_na(state: &BlockState) -> f64 {
    state.amp.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum()
}

/// `⟨N_a⟩(t)` starting from `|L⟩|k,0⟩`.
pub fn mean_na_trajectory(cfg: &EvolutionConfig, times: &[f64]) -> Result<Vec<f64>> {
    let sys = eigensystem(cfg)?;
    let coeff = sys.project(&BlockState::reference(cfg.label))?;
    Ok(times.par_iter().map(|&t| mean_na(&sys.assemble(&coeff, t))).collect())
}

/// Settings for the efficiency scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub points: usize,
    /// Golden-section stopping width in `t`.
    pub refine_tol: f64,
    /// Largest denominator tried when looking for a common frequency.
    pub max_denominator: usize,
    /// Window length, in units of `2π / smallest gap`, when no common
    /// frequency is found.
    pub fallback_periods: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec { points: 10_000, refine_tol: 1e-12, max_denominator: 64, fallback_periods: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferEfficiency {
    /// `(L − min ⟨N_a⟩) / L`.
    pub xi: f64,
    pub t_min: f64,
    pub min_mean_na: f64,
    /// Scanned interval `[0, window]`.
    pub window: f64,
    /// Set when the gaps have no common frequency; `xi` is then only the
    /// infimum over the window.
    pub approximate: bool,
}

/// Largest `g` with every gap an integer multiple of `g` (to relative
/// `1e−9`), trying `g = g_min / q` for `q ≤ max_q`.
fn common_frequency(gaps: &[f64], max_q: usize) -> Option<f64> {
    let g_min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    (1..=max_q).map(|q| g_min / q as f64).find(|g| {
        gaps.iter().all(|x| {
            let m = x / g;
            (m - m.round()).abs() <= 1e-9 * m.max(1.0)
        })
    })
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Energy-transfer efficiency from `|L⟩|k,0⟩`, by a dense scan over one
/// period of `⟨N_a⟩(t)` and golden-section refinement of the minimum.
pub fn transfer_efficiency(cfg: &EvolutionConfig, scan: &ScanSpec) -> Result<TransferEfficiency> {
    let l = cfg.label.l;
    if l == 0 {
        return Err(Error::domain("transfer efficiency is undefined for L = 0"));
    }
    if scan.points < 3 {
        return Err(Error::domain("efficiency scan needs at least 3 points"));
    }
    let sys = eigensystem(cfg)?;
    let coeff = sys.project(&BlockState::reference(cfg.label))?;
    let scale = sys.matrix_norm();
    let mut gaps: Vec<f64> = Vec::new();
    for (i, a) in sys.values.iter().enumerate() {
        for b in &sys.values[i + 1..] {
            let g = b - a;
            if g > 1e-12 * scale {
                gaps.push(g);
            }
        }
    }
    let g_min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let (window, approximate) = match common_frequency(&gaps, scan.max_denominator) {
        Some(g) => (2.0 * PI / g, false),
        None => (scan.fallback_periods * 2.0 * PI / g_min, true),
    };
    let f = |t: f64| mean_na(&sys.assemble(&coeff, t));
    let h = window / (scan.points - 1) as f64;
    let samples: Vec<f64> = (0..scan.points).into_par_iter().map(|i| f(i as f64 * h)).collect();
    let i_min = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    let lo = (i_min as f64 - 1.0).max(0.0) * h;
    let hi = ((i_min + 1) as f64 * h).min(window);
    let (t_ref, v_ref) = golden_min(f, lo, hi, scan.refine_tol);
    let (t_min, min_mean_na) = if v_ref <= samples[i_min] { (t_ref, v_ref) } else { (i_min as f64 * h, samples[i_min]) };
    let lf = l as f64;
    Ok(TransferEfficiency { xi: (lf - min_mean_na) / lf, t_min, min_mean_na, window, approximate })
}

/// `1 − 1/(4k+1)²`, the `L = 2` efficiency.
pub fn efficiency_l2(k: f64) -> f64 {
    1.0 - 1.0 / (4.0 * k + 1.0).powi(2)
}

/// Second-order short-time state
/// `(1 − kL|z|²)|L⟩|k,0⟩ + z√(2kL)|L−1⟩|k,1⟩ + z²√((2k²+k)(L²−L))|L−2⟩|k,2⟩`.
pub fn second_order_state(label: SubspaceLabel, z: Complex64) -> BlockState {
    let (k, l) = (label.k.value(), label.l as f64);
    let mut s = BlockState::zero(label);
    s.amp[label.l] = Complex64::new(1.0 - k * l * z.norm_sqr(), 0.0);
    if label.l >= 1 {
        s.amp[label.l - 1] = z * (2.0 * k * l).sqrt();
    }
    if label.l >= 2 {
        s.amp[label.l - 2] = z * z * ((2.0 * k * k + k) * (l * l - l)).sqrt();
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortTimeReport {
    pub z_abs: Vec<f64>,
    /// `‖ψ(t) − |z;k,L⟩‖` with `z = −iκt`.
    pub deviations: Vec<f64>,
    /// `‖ψ(t) − second_order_state(z)‖`.
    pub second_order_errors: Vec<f64>,
    /// Least-squares slope of `ln deviation` against `ln |z|` over the
    /// nonzero grid points.
    pub slope: f64,
}

/// Evolves `|L⟩|k,0⟩` for `t = |z|/|κ|` with `|κ| = 1` and compares with
/// the coherent state at `z = −iκt`.
pub fn short_time_compare(label: SubspaceLabel, z_abs: &[f64], kappa_phase: f64) -> Result<ShortTimeReport> {
    let kappa = Complex64::from_polar(1.0, kappa_phase);
    let sys = eigensystem(&EvolutionConfig::new(label, kappa))?;
    let psi0 = BlockState::reference(label);
    let mut deviations = Vec::with_capacity(z_abs.len());
    let mut second = Vec::with_capacity(z_abs.len());
    for &t in z_abs {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("|z| must be nonnegative, got {t}")));
        }
        let psi = sys.evolve(&psi0, t)?;
        let z = Complex64::new(0.0, -1.0) * kappa * t;
        deviations.push(psi.distance(&coherent_state(&CoherentParams::new(label, z)))?);
        second.push(psi.distance(&second_order_state(label, z))?);
    }
    let pts: Vec<(f64, f64)> = z_abs
        .iter()
        .zip(&deviations)
        .filter(|(z, d)| **z > 0.0 && **d > 0.0)
        .map(|(z, d)| (z.ln(), d.ln()))
        .collect();
    let slope = if pts.len() < 2 {
        f64::NAN
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    Ok(ShortTimeReport { z_abs: z_abs.to_vec(), deviations, second_order_errors: second, slope })
}
