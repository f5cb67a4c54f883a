//! Analytic representations of block states.
//!
//! A state `f` of block `(k, L)` is mapped to the polynomial
//! `Y_f(y) = Σ_n d_n conj(f_n) y^n` with `d_n = d̃_{L−n}`. The map is
//! antilinear in `f`. The z-plane form is the coefficient reversal
//! `Z_f(z) = z^L Y_f(1/z)`, and the double representation is
//! `D_f(α, ζ) = ζ^L Y_f(α/ζ) / √(L!)`.
//!
//! The resolution of the identity reduces, after the angular integral, to
//! the radial moments `I_n = ∫_0^∞ r^n Φ(L+2; 2k+L+1; −r) dr`. The decaying
//! factor has an algebraic tail `∝ r^{−(L+2)}` (except at `k = 1/2`, where
//! it is `e^{−r}`), so the moments are computed on geometric panels up to a
//! cutoff plus an analytic asymptotic tail, and cross-checked by a
//! trapezoid rule in `ln r`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::coherent::{coherent_state_y, ln_dtilde_table};
use crate::error::{Error, Result};
use crate::linalg::GaussLegendre;
use crate::special::{kummer_exp_scaled, kummer_terminating_scaled, ldexp};
use crate::subspace::{apply_a_kplus, apply_adag_kminus, apply_k0, BlockState, SubspaceLabel};

/// `Y_f(y) = Σ coeff[n] y^n` for a state of block `label`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRep {
    pub label: SubspaceLabel,
    pub coeff: Vec<Complex64>,
}

impl PolyRep {
    pub fn eval(&self, y: Complex64) -> Complex64 {
        self.coeff.iter().rev().fold(Complex64::zero(), |acc, c| acc * y + c)
    }

    /// Coefficients of the derivative, as a plain sequence.
    fn derivative_coeff(c: &[Complex64]) -> Vec<Complex64> {
        c.iter().enumerate().skip(1).map(|(n, x)| x * n as f64).collect()
    }

    /// `(Y, Y', Y'')` at `y`.
    pub fn eval_with_derivatives(&self, y: Complex64) -> [Complex64; 3] {
        let horner = |c: &[Complex64]| c.iter().rev().fold(Complex64::zero(), |acc, x| acc * y + x);
        let d1 = Self::derivative_coeff(&self.coeff);
        let d2 = Self::derivative_coeff(&d1);
        [horner(&self.coeff), horner(&d1), horner(&d2)]
    }
}

/// `d_n(k, L) = d̃_{L−n}(k, L)` for `n = 0..=L`.
fn d_table(label: SubspaceLabel) -> Vec<f64> {
    let ln = ln_dtilde_table(label);
    (0..label.dim()).map(|n| ln[label.l - n].exp()).collect()
}

pub fn to_poly(f: &BlockState) -> PolyRep {
    let d = d_table(f.label);
    PolyRep {
        label: f.label,
        coeff: f.amp.iter().zip(&d).map(|(a, d)| a.conj() * d).collect(),
    }
}

pub fn from_poly(p: &PolyRep) -> BlockState {
    let d = d_table(p.label);
    BlockState {
        label: p.label,
        amp: p.coeff.iter().zip(&d).map(|(c, d)| (c / d).conj()).collect(),
    }
}

/// z-plane representation: the coefficient of `z^n` is the y-coefficient of
/// `y^{L−n}`.
pub fn z_rep(p: &PolyRep) -> PolyRep {
    PolyRep {
        label: p.label,
        coeff: p.coeff.iter().rev().copied().collect(),
    }
}

/// `D_f(α, ζ) = Σ_n √(Γ(2k+L−n) / (n!(L−n)! Γ(2k))) conj(f_n) α^n ζ^{L−n}`.
pub fn double_rep_eval(f: &BlockState, alpha: Complex64, zeta: Complex64) -> Result<Complex64> {
    if zeta == Complex64::zero() {
        return Err(Error::domain("double representation needs ζ ≠ 0; use the z-representation at ζ = 0"));
    }
    if zeta.norm() >= 1.0 {
        return Err(Error::domain(format!("double representation needs |ζ| < 1, got {}", zeta.norm())));
    }
    let l = f.label.l;
    let twok = f.label.k.twice();
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=l).scan(0.0, |acc, j| {
            *acc += (j as f64).ln();
            Some(*acc)
        }))
        .collect();
    let mut sum = Complex64::zero();
    for (n, fn_) in f.amp.iter().enumerate() {
        let ln_poch: f64 = (0..l - n).map(|j| (twok + j as f64).ln()).sum();
        let e = (0.5 * (ln_poch - ln_fact[n] - ln_fact[l - n])).exp();
        sum += fn_.conj() * e * alpha.powu(n as u32) * zeta.powu((l - n) as u32);
    }
    Ok(sum)
}

/// The three generators acting within a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    AKPlus,
    ADagKMinus,
    K0,
}

impl Operator {
    pub const ALL: [Operator; 3] = [Operator::AKPlus, Operator::ADagKMinus, Operator::K0];

    /// Matrix action on block amplitudes.
    pub fn apply(self, f: &BlockState) -> BlockState {
        match self {
            Operator::AKPlus => apply_a_kplus(f),
            Operator::ADagKMinus => apply_adag_kminus(f),
            Operator::K0 => apply_k0(f),
        }
    }
}

/// y-plane differential operators:
/// `aK₊ → −y ∂² + (L+2k−1) ∂`, `a†K₋ → −y² ∂ + L y`, `K₀ → −y ∂ + k + L`.
pub fn diff_op(which: Operator, p: &PolyRep) -> PolyRep {
    let l = p.label.l;
    let twok = p.label.k.twice();
    let lf = l as f64;
    let mut out = vec![Complex64::zero(); p.coeff.len()];
    for (n, c) in p.coeff.iter().enumerate() {
        let nf = n as f64;
        match which {
            Operator::AKPlus if n > 0 => out[n - 1] += c * (nf * (lf + twok - nf)),
            Operator::ADagKMinus if n < l => out[n + 1] += c * (lf - nf),
            Operator::K0 => out[n] += c * (0.5 * twok + lf - nf),
            _ => {}
        }
    }
    PolyRep { label: p.label, coeff: out }
}

/// `2L+3` equally spaced points on the circle of radius `1 + |y₀|`.
pub fn sample_points(label: SubspaceLabel, y0: Complex64) -> Vec<Complex64> {
    let m = 2 * label.l + 3;
    let radius = 1.0 + y0.norm();
    (0..m)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64))
        .collect()
}

/// Max over the points of `|Σ terms| / Σ |terms|`.
fn relative_residual(points: &[Complex64], terms: impl Fn(Complex64) -> [Complex64; 3]) -> f64 {
    points
        .iter()
        .map(|&y| {
            let t = terms(y);
            let scale: f64 = t.iter().map(|x| x.norm()).sum();
            if scale == 0.0 {
                0.0
            } else {
                (t[0] + t[1] + t[2]).norm() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Residual of `y Y₀'' − [y₀* y + (L+2k−1)] Y₀' + L y₀* Y₀ = 0` for the
/// coherent-state polynomial `Y₀`, relative to the size of the three terms.
pub fn ode_residual_cs(y0: Complex64, label: SubspaceLabel, points: &[Complex64]) -> f64 {
    let p = to_poly(&coherent_state_y(label, y0));
    let (l, twok) = (label.l as f64, label.k.twice());
    let y0c = y0.conj();
    relative_residual(points, |y| {
        let [v, d1, d2] = p.eval_with_derivatives(y);
        [y * d2, -(y0c * y + (l + twok - 1.0)) * d1, l * y0c * v]
    })
}

/// Residual of `y Y'' + [γ y² − (L+2k−1)] Y' + (ν̄ − γ L y) Y = 0` for an
/// eigenvector of `κ aK₊ + κ* a†K₋` with eigenvalue `ν`, where `γ = κ/κ*`
/// and `ν̄ = ν/κ*`.
pub fn ode_residual_eigen(
    nu: f64,
    eigvec: &BlockState,
    label: SubspaceLabel,
    kappa: Complex64,
    points: &[Complex64],
) -> Result<f64> {
    label.check_same(&eigvec.label)?;
    if kappa == Complex64::zero() {
        return Err(Error::domain("κ = 0 has no eigen-equation"));
    }
    let gamma = kappa / kappa.conj();
    let nu_bar = nu / kappa.conj();
    let p = to_poly(eigvec);
    let (l, twok) = (label.l as f64, label.k.twice());
    Ok(relative_residual(points, |y| {
        let [v, d1, d2] = p.eval_with_derivatives(y);
        [y * d2, (gamma * y * y - (l + twok - 1.0)) * d1, (nu_bar - gamma * l * y) * v]
    }))
}

/// `Φ(−L; 1−L−2k; r)` as a scaled value.
fn growing_factor(r: f64, label: SubspaceLabel) -> Result<(f64, i64)> {
    let l = label.l;
    let s = kummer_terminating_scaled(l, 1.0 - l as f64 - label.k.twice(), r)?;
    Ok((s.value, s.exp2))
}

/// Radius beyond which `Φ(L+2; 2k+L+1; −r)` is taken from its asymptotic
/// series.
fn tail_cutoff(label: SubspaceLabel) -> f64 {
    (20.0 * (label.l as f64 + 2.0)).max(200.0)
}

/// `(2k−1)_{L+2} = Γ(2k+L+1)/Γ(2k−1)`, the leading coefficient of the
/// algebraic tail.
fn tail_constant(label: SubspaceLabel) -> f64 {
    let twok = label.k.twice();
    (0..label.l + 2).map(|j| twok - 1.0 + j as f64).product()
}

/// Terms `(a)_s (a−b+1)_s / (s! r^s)` of the large-`r` series of
/// `r^a Φ(a; b; −r) / (b−a)_a`, with `a = L+2` and `b = 2k+L+1`.
fn tail_series_terms(r: f64, label: SubspaceLabel) -> Vec<f64> {
    let a = label.l as f64 + 2.0;
    let c = 2.0 - label.k.twice();
    let mut terms = vec![1.0];
    let mut t = 1.0f64;
    for s in 0..400 {
        let sf = s as f64;
        let next = t * (a + sf) * (c + sf) / ((sf + 1.0) * r);
        if next == 0.0 || next.abs() >= t.abs() || next.abs() < 1e-18 {
            if next != 0.0 && next.abs() < t.abs() {
                terms.push(next);
            }
            break;
        }
        terms.push(next);
        t = next;
    }
    terms
}

/// `Φ(L+2; 2k+L+1; −r) = e^{−r} Φ(2k−1; 2k+L+1; r)`.
fn decaying_factor(r: f64, label: SubspaceLabel) -> Result<f64> {
    let twok = label.k.twice();
    let l = label.l as f64;
    if twok == 1.0 {
        return Ok((-r).exp());
    }
    if r <= tail_cutoff(label) {
        return kummer_exp_scaled(twok - 1.0, twok + l + 1.0, r, 1e-17);
    }
    let series: f64 = tail_series_terms(r, label).iter().sum();
    Ok(tail_constant(label) * r.powf(-(l + 2.0)) * series)
}

/// `∫_R^∞ r^n Φ(L+2; 2k+L+1; −r) dr` from the asymptotic series, valid
/// for `n ≤ L`.
fn tail_moment(n: usize, big_r: f64, label: SubspaceLabel) -> f64 {
    let a = label.l as f64 + 2.0;
    let nf = n as f64;
    let sum: f64 = tail_series_terms(big_r, label)
        .iter()
        .enumerate()
        .map(|(s, t)| t / (a + s as f64 - nf - 1.0))
        .sum();
    tail_constant(label) * big_r.powf(nf - a + 1.0) * sum
}

/// Density of the measure in `(r = |y|², φ)`:
/// `(1/2π) (L+1)/(L+2k) Φ(−L; 1−L−2k; r) Φ(L+2; 2k+L+1; −r)`.
pub fn measure_density(r: f64, label: SubspaceLabel) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("measure density needs r ≥ 0, got {r}")));
    }
    let l = label.l as f64;
    let pref = (l + 1.0) / (l + label.k.twice()) / (2.0 * PI);
    let (g, e) = growing_factor(r, label)?;
    Ok(ldexp(pref * g * decaying_factor(r, label)?, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Gauss–Legendre on geometric panels up to a cutoff, asymptotic tail
    /// beyond.
    GaussLegendrePanels,
    /// Trapezoid rule in `u = ln r`.
    LogTrapezoid,
}

impl QuadratureScheme {
    fn other(self) -> Self {
        match self {
            QuadratureScheme::GaussLegendrePanels => QuadratureScheme::LogTrapezoid,
            QuadratureScheme::LogTrapezoid => QuadratureScheme::GaussLegendrePanels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParams {
    pub label: SubspaceLabel,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    pub scheme: QuadratureScheme,
    /// Allowed disagreement between the two quadrature routes.
    pub tolerance: f64,
}

impl MeasureParams {
    pub fn new(label: SubspaceLabel) -> Self {
        MeasureParams {
            label,
            nodes: (4 * (label.l + 1)).max(64),
            scheme: QuadratureScheme::GaussLegendrePanels,
            tolerance: 1e-10,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < self.label.l + 2 {
            return Err(Error::domain(format!(
                "quadrature needs at least L+2 = {} nodes, got {}",
                self.label.l + 2,
                self.nodes
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("quadrature tolerance must be positive"));
        }
        Ok(())
    }
}

/// `I_n = ∫_0^∞ r^n Φ(L+2; 2k+L+1; −r) dr` for `n = 0..=L`.
fn radial_moments(label: SubspaceLabel, nodes: usize, scheme: QuadratureScheme) -> Result<Vec<f64>> {
    let dim = label.dim();
    let big_r = tail_cutoff(label);
    let mut moments = vec![0.0; dim];
    let mut accumulate = |r: f64, w: f64| -> Result<()> {
        let f = decaying_factor(r, label)? * w;
        let mut p = f;
        for m in moments.iter_mut() {
            *m += p;
            p *= r;
        }
        Ok(())
    };
    match scheme {
        QuadratureScheme::GaussLegendrePanels => {
            let rule = GaussLegendre::new(nodes);
            let mut edges = vec![0.0, 0.5];
            while *edges.last().unwrap() * 2.0 < big_r {
                edges.push(edges.last().unwrap() * 2.0);
            }
            edges.push(big_r);
            for w in edges.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (half, mid) = (0.5 * (b - a), 0.5 * (b + a));
                for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                    accumulate(mid + half * x, half * wt)?;
                }
            }
            for (n, m) in moments.iter_mut().enumerate() {
                *m += tail_moment(n, big_r, label);
            }
        }
        QuadratureScheme::LogTrapezoid => {
            // dr = r du; the integrand r^{n+1} f(r) decays at both ends of u
            let h = 1.0 / 32.0;
            let (u_lo, u_hi) = (-40.0f64, 40.0f64);
            let steps = ((u_hi - u_lo) / h).round() as usize;
            for i in 0..=steps {
                let u = u_lo + i as f64 * h;
                let r = u.exp();
                let w = if i == 0 || i == steps { 0.5 * h * r } else { h * r };
                accumulate(r, w)?;
            }
            for (n, m) in moments.iter_mut().enumerate() {
                *m += tail_moment(n, u_hi.exp(), label);
            }
        }
    }
    Ok(moments)
}

/// `P_n = (L+1)! / (n!(L−n)!) / Π_{j=L−n}^{L} (2k+j)`, so that the
/// identity holds iff `P_n I_n = 1`.
fn moment_normalization(label: SubspaceLabel) -> Vec<f64> {
    let l = label.l;
    let twok = label.k.twice();
    let mut out = Vec::with_capacity(label.dim());
    let mut binom = 1.0;
    for n in 0..=l {
        if n > 0 {
            binom *= (l - n + 1) as f64 / n as f64;
        }
        let denom: f64 = (l - n..=l).map(|j| twok + j as f64).product();
        out.push((l + 1) as f64 * binom / denom);
    }
    out
}

/// Normalized moments `P_n I_n` from the chosen scheme.
pub fn normalized_moments(mp: &MeasureParams) -> Result<Vec<f64>> {
    mp.validate()?;
    let raw = radial_moments(mp.label, mp.nodes, mp.scheme)?;
    Ok(moment_normalization(mp.label).iter().zip(&raw).map(|(p, i)| p * i).collect())
}

/// Per-moment deviations `|P_n I_n − 1|`. Both quadrature routes are run;
/// if they disagree by more than `mp.tolerance` a quadrature error names
/// the worst moment.
pub fn identity_check(mp: &MeasureParams) -> Result<Vec<f64>> {
    let primary = normalized_moments(mp)?;
    let check = normalized_moments(&MeasureParams { scheme: mp.scheme.other(), ..*mp })?;
    let (worst, gap) = primary
        .iter()
        .zip(&check)
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold((0, 0.0), |acc, (n, g)| if g > acc.1 || g.is_nan() { (n, g) } else { acc });
    if gap > mp.tolerance || gap.is_nan() {
        return Err(Error::Quadrature { moment: worst, deviation: gap });
    }
    Ok(primary.iter().map(|m| (m - 1.0).abs()).collect())
}

/// Reproduces `Y_f(y)` through the kernel integral. After the angular
/// integral each monomial `y^n` of `Y_f` comes back multiplied by the
/// normalized moment `P_n I_n`. Returns the deviation relative to
/// `Σ |c_n| |y|^n`.
pub fn kernel_check(f: &BlockState, y: Complex64, mp: &MeasureParams) -> Result<f64> {
    mp.label.check_same(&f.label)?;
    let moments = normalized_moments(mp)?;
    let p = to_poly(f);
    let mut scale = 0.0;
    let mut diff = Complex64::zero();
    let mut yn = Complex64::new(1.0, 0.0);
    for (c, m) in p.coeff.iter().zip(&moments) {
        diff += c * yn * (m - 1.0);
        scale += c.norm() * yn.norm();
        yn *= y;
    }
    Ok(if scale == 0.0 { 0.0 } else { diff.norm() / scale })
}
