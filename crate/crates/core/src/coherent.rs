//! Coherent states `|z;k,L⟩ ∝ exp(z a K₊) |L⟩|k,0⟩`.
//!
//! In the block basis the state has `amp[L−m] = d̃_m z^m / √G(|z|²)` with
//! `d̃_m² = L! Γ(2k+m) / (m! (L−m)! Γ(2k))` and `G(w) = Σ d̃_m² w^m`.
//! Amplitudes are generated in log-magnitude form from the ratio
//! `d̃_{m+1}/d̃_m = √((L−m)(2k+m)/(m+1))` and normalized once.

use std::collections::HashSet;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::subspace::{
    apply_a_kplus, apply_k0, apply_na, lower_pair, lower_pump, raise_pair, BlockState, SubspaceLabel,
};

/// A point of the coherent-state manifold of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentParams {
    pub label: SubspaceLabel,
    pub z: Complex64,
}

impl CoherentParams {
    pub fn new(label: SubspaceLabel, z: Complex64) -> Self {
        CoherentParams { label, z }
    }

    /// `y = 1/z`; `y = 0` would be `z = ∞` and is rejected.
    pub fn from_y(label: SubspaceLabel, y: Complex64) -> Result<Self> {
        if y == Complex64::zero() {
            return Err(Error::domain("y-form needs y ≠ 0 (z = 1/y)"));
        }
        Ok(CoherentParams { label, z: y.inv() })
    }

    /// `y = 1/z`, or `None` at the reference point `z = 0`.
    pub fn y(&self) -> Option<Complex64> {
        (self.z != Complex64::zero()).then(|| self.z.inv())
    }
}

/// `ln d̃_m(k, L)` for `m = 0..=L`.
pub fn ln_dtilde_table(label: SubspaceLabel) -> Vec<f64> {
    let twok = label.k.twice();
    let l = label.l as f64;
    let mut out = Vec::with_capacity(label.dim());
    let mut acc = 0.0;
    out.push(acc);
    for m in 0..label.l {
        let mf = m as f64;
        acc += 0.5 * ((l - mf) * (twok + mf) / (mf + 1.0)).ln();
        out.push(acc);
    }
    out
}

/// `d̃_n(k, L) = √(L!/(L−n)!) · √(Γ(2k+n)/(n! Γ(2k)))`, as a product of
/// paired factors `√((L−j)(2k+j)/(j+1))`.
pub fn dtilde(label: SubspaceLabel, n: usize) -> f64 {
    assert!(n <= label.l, "d̃_n needs n ≤ L");
    let twok = label.k.twice();
    let l = label.l as f64;
    (0..n)
        .map(|j| {
            let j = j as f64;
            ((l - j) * (twok + j) / (j + 1.0)).sqrt()
        })
        .product()
}

/// `G(w) = Σ_m d̃_m² w^m`, the analytic continuation of the normalization.
pub fn norm_poly(w: Complex64, label: SubspaceLabel) -> Complex64 {
    let twok = label.k.twice();
    let l = label.l as f64;
    // Horner on coefficients d̃_m², built upward then folded from the top
    let mut coeff = Vec::with_capacity(label.dim());
    let mut d2 = 1.0;
    coeff.push(d2);
    for m in 0..label.l {
        let mf = m as f64;
        d2 *= (l - mf) * (twok + mf) / (mf + 1.0);
        coeff.push(d2);
    }
    coeff.iter().rev().fold(Complex64::zero(), |acc, c| acc * w + c)
}

/// Log-magnitudes `2 ln d̃_m + m ln|w|`, with the `w = 0` case kept finite at
/// `m = 0`.
fn ln_norm_terms(ln_d: &[f64], ln_abs_w: f64) -> Vec<f64> {
    ln_d.iter()
        .enumerate()
        .map(|(m, ld)| if m == 0 { 2.0 * ld } else { 2.0 * ld + m as f64 * ln_abs_w })
        .collect()
}

fn max_finite(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn build_amplitudes(params: &CoherentParams, keep: impl Fn(usize) -> bool) -> BlockState {
    let label = params.label;
    let z = params.z;
    if z == Complex64::zero() {
        return BlockState::reference(label);
    }
    let ln_d = ln_dtilde_table(label);
    let (ln_abs, arg) = (z.norm().ln(), z.arg());
    let ln_mag: Vec<f64> = (0..label.dim())
        .map(|m| if keep(m) { ln_d[m] + m as f64 * ln_abs } else { f64::NEG_INFINITY })
        .collect();
    let top = max_finite(&ln_mag);
    let mut state = BlockState::zero(label);
    for m in 0..label.dim() {
        if keep(m) {
            state.amp[label.l - m] = Complex64::from_polar((ln_mag[m] - top).exp(), m as f64 * arg);
        }
    }
    state.normalized().expect("at least the m = 0 term is present")
}

/// `|z;k,L⟩`, normalized.
pub fn coherent_state(params: &CoherentParams) -> BlockState {
    build_amplitudes(params, |_| true)
}

/// `|y;k,L⟩`. At `y = 0` this is the `z → ∞` limit `|0⟩|k,L⟩`.
pub fn coherent_state_y(label: SubspaceLabel, y: Complex64) -> BlockState {
    if y == Complex64::zero() {
        BlockState::basis(label, 0).expect("n = 0 is in every block")
    } else {
        coherent_state(&CoherentParams::new(label, y.inv()))
    }
}

/// `⟨z₁;k,L|z₂;k,L⟩ = G(z₁* z₂) / √(G(|z₁|²) G(|z₂|²))`, evaluated with a
/// common log scale so that large `|z|` and `L` do not overflow.
pub fn overlap(p1: &CoherentParams, p2: &CoherentParams) -> Result<Complex64> {
    p1.label.check_same(&p2.label)?;
    let ln_d = ln_dtilde_table(p1.label);
    let (l1, l2) = (2.0 * p1.z.norm().ln(), 2.0 * p2.z.norm().ln());
    let t1 = ln_norm_terms(&ln_d, l1);
    let t2 = ln_norm_terms(&ln_d, l2);
    let cross: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| 0.5 * (a + b)).collect();
    let (s1, s2, s) = (max_finite(&t1), max_finite(&t2), max_finite(&cross));
    let g1: f64 = t1.iter().map(|t| (t - s1).exp()).sum();
    let g2: f64 = t2.iter().map(|t| (t - s2).exp()).sum();
    let phase = (p1.z.conj() * p2.z).arg();
    let num: Complex64 = cross
        .iter()
        .enumerate()
        .map(|(m, t)| Complex64::from_polar((t - s).exp(), m as f64 * phase))
        .sum();
    Ok(num * (s - 0.5 * (s1 + s2)).exp() / (g1 * g2).sqrt())
}

/// Residual norms of the three eigenvalue equations of `|z;k,L⟩`:
///
/// 1. `(a†a + z aK₊ − L) ψ`
/// 2. `(K₀ − z aK₊ − k) ψ`
/// 3. `(K₋ − 2z aK₀ + z² a²K₊) ψ`, which lands in block `L − 1`
pub fn eigen_residuals(params: &CoherentParams) -> [f64; 3] {
    let psi = coherent_state(params);
    let label = params.label;
    let z = params.z;
    let k = label.k.value();
    let l = label.l as f64;
    let akp = apply_a_kplus(&psi);

    let na = apply_na(&psi);
    let r1 = na
        .amp
        .iter()
        .zip(&akp.amp)
        .zip(&psi.amp)
        .map(|((n, a), p)| (n + z * a - l * p).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let k0 = apply_k0(&psi);
    let r2 = k0
        .amp
        .iter()
        .zip(&akp.amp)
        .zip(&psi.amp)
        .map(|((q, a), p)| (q - z * a - k * p).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let r3 = match (lower_pair(&psi), lower_pump(&apply_k0(&psi))) {
        (Some(km), Some(ak0)) => {
            let a2kp = lower_pump(&lower_pump(&raise_pair(&psi)).expect("raised block has L ≥ 1"))
                .expect("L ≥ 1 here");
            km.amp
                .iter()
                .zip(&ak0.amp)
                .zip(&a2kp.amp)
                .map(|((x, y), w)| (x - 2.0 * z * y + z * z * w).norm_sqr())
                .sum::<f64>()
                .sqrt()
        }
        _ => 0.0,
    };
    [r1, r2, r3]
}

/// One block of a [`MultiBlockState`] with its complex weight `g_k h_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBlock {
    pub weight: Complex64,
    pub state: BlockState,
}

/// `Σ g_k h_L |z;k,L⟩` over distinct blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiBlockState {
    pub entries: Vec<WeightedBlock>,
}

impl MultiBlockState {
    pub fn new(entries: Vec<WeightedBlock>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.state.label) {
                return Err(Error::domain(format!("duplicate block {} in superposition", e.state.label)));
            }
        }
        let total: f64 = entries.iter().map(|e| e.weight.norm_sqr()).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("superposition weights have Σ|w|² = {total}, expected 1")));
        }
        Ok(MultiBlockState { entries })
    }

    /// Expectation of a block-diagonal observable given its per-block value.
    pub fn expectation(&self, per_block: impl Fn(&BlockState) -> f64) -> f64 {
        self.entries.iter().map(|e| e.weight.norm_sqr() * per_block(&e.state)).sum()
    }

    pub fn mean_pump_number(&self) -> f64 {
        self.expectation(|s| s.amp.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum())
    }
}

/// Coherent states with a common `z` over several blocks.
pub fn superposition(entries: &[(Complex64, SubspaceLabel)], z: Complex64) -> Result<MultiBlockState> {
    MultiBlockState::new(
        entries
            .iter()
            .map(|&(weight, label)| WeightedBlock {
                weight,
                state: coherent_state(&CoherentParams::new(label, z)),
            })
            .collect(),
    )
}

/// Normalized even part `∝ |z;k,L⟩ + |−z;k,L⟩`, i.e. only even powers of
/// `z` are kept. Defined for every `L`.
pub fn even_cat(params: &CoherentParams) -> BlockState {
    build_amplitudes(params, |m| m % 2 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::BargmannIndex;
    use approx::assert_relative_eq;

    fn label(p: i64, q: i64, l: usize) -> SubspaceLabel {
        SubspaceLabel::new(BargmannIndex::new(p, q).unwrap(), l)
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dtilde_examples() {
        let lab = label(3, 2, 7);
        let (k, l): (f64, f64) = (1.5, 7.0);
        assert_eq!(dtilde(lab, 0), 1.0);
        assert_relative_eq!(dtilde(lab, 1), (2.0 * k * l).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(dtilde(lab, 2), ((2.0 * k * k + k) * (l * l - l)).sqrt(), max_relative = 1e-15);
        let ln = ln_dtilde_table(lab);
        for n in 0..=7 {
            assert_relative_eq!(ln[n].exp(), dtilde(lab, n), max_relative = 1e-13);
        }
    }

    #[test]
    fn norm_poly_examples() {
        let lab = label(5, 2, 1);
        assert_eq!(norm_poly(cx(0.0, 0.0), lab), cx(1.0, 0.0));
        let w = cx(0.3, -0.4);
        assert!((norm_poly(w, lab) - (1.0 + 5.0 * w)).norm() < 1e-15);
    }

    #[test]
    fn norm_poly_matches_kummer_route() {
        // G(w) = Γ(2k+L)/Γ(2k) · w^L · Φ(−L; 1−L−2k; 1/w)
        let lab = label(1, 1, 5);
        let w: f64 = 0.3;
        let via_kummer = crate::special::gamma_ratio(2.0, 5)
            * w.powi(5)
            * crate::special::kummer_terminating(5, 1.0 - 5.0 - 2.0, 1.0 / w).unwrap();
        assert_relative_eq!(norm_poly(cx(w, 0.0), lab).re, via_kummer, max_relative = 1e-12);
    }

    #[test]
    fn coherent_state_examples() {
        let lab = label(3, 2, 4);
        assert_eq!(coherent_state(&CoherentParams::new(lab, Complex64::zero())), BlockState::reference(lab));

        let k = 0.75;
        let lab1 = label(3, 4, 1);
        let z = cx(0.4, 0.9);
        let s = coherent_state(&CoherentParams::new(lab1, z));
        let n = (1.0 + 2.0 * k * z.norm_sqr()).sqrt();
        assert!((s.amp[1] - 1.0 / n).norm() < 1e-15);
        assert!((s.amp[0] - (2.0 * k).sqrt() * z / n).norm() < 1e-15);

        let lab2 = label(3, 4, 2);
        let s = coherent_state(&CoherentParams::new(lab2, z));
        let want = [(2.0 * k * (2.0 * k + 1.0)).sqrt() * z * z, (4.0 * k).sqrt() * z, cx(1.0, 0.0)];
        for n in 0..3 {
            assert!((s.amp[n] / s.amp[2] - want[n]).norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_state_survives_large_parameters() {
        let lab = label(10, 1, 200);
        let s = coherent_state(&CoherentParams::new(lab, cx(6.0, 8.0)));
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!(s.amp.iter().all(|a| a.re.is_finite() && a.im.is_finite()));
    }

    #[test]
    fn overlap_examples() {
        let lab = label(1, 1, 3);
        let p = CoherentParams::new(lab, cx(0.4, 0.0));
        assert!((overlap(&p, &p).unwrap() - 1.0).norm() < 1e-15);
        let p0 = CoherentParams::new(lab, Complex64::zero());
        let g = norm_poly(cx(0.16, 0.0), lab).re;
        assert_relative_eq!(overlap(&p, &p0).unwrap().re, 1.0 / g.sqrt(), max_relative = 1e-14);

        let q = CoherentParams::new(lab, cx(0.0, 0.7));
        let brute = coherent_state(&p).inner(&coherent_state(&q)).unwrap();
        assert!((overlap(&p, &q).unwrap() - brute).norm() < 1e-14);

        let other = CoherentParams::new(label(1, 1, 4), cx(0.4, 0.0));
        assert!(matches!(overlap(&p, &other), Err(Error::LabelMismatch { .. })));
    }

    #[test]
    fn eigen_residual_examples() {
        assert_eq!(eigen_residuals(&CoherentParams::new(label(1, 1, 5), Complex64::zero())), [0.0; 3]);
        for r in eigen_residuals(&CoherentParams::new(label(1, 1, 5), cx(0.8, 0.0))) {
            assert!(r < 1e-10);
        }
        for r in eigen_residuals(&CoherentParams::new(label(1, 2, 1), cx(2.0, 0.0))) {
            assert!(r < 1e-12);
        }
    }

    #[test]
    fn superposition_examples() {
        let lab = label(1, 1, 3);
        let z = cx(0.3, 0.2);
        let single = superposition(&[(cx(1.0, 0.0), lab)], z).unwrap();
        assert_eq!(single.entries[0].state, coherent_state(&CoherentParams::new(lab, z)));

        let w = cx(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let (a, b) = (label(1, 1, 1), label(1, 1, 2));
        let mb = superposition(&[(w, a), (w, b)], z).unwrap();
        let mean = |s: &BlockState| -> f64 { s.amp.iter().enumerate().map(|(n, x)| n as f64 * x.norm_sqr()).sum() };
        let want = 0.5 * (mean(&coherent_state(&CoherentParams::new(a, z))) + mean(&coherent_state(&CoherentParams::new(b, z))));
        assert_relative_eq!(mb.mean_pump_number(), want, max_relative = 1e-14);

        let h = [cx(0.6, 0.0), cx(0.0, 0.8)];
        let mb = superposition(&[(h[0], label(1, 1, 2)), (h[1], label(1, 1, 5))], Complex64::zero()).unwrap();
        assert_relative_eq!(mb.mean_pump_number(), 0.36 * 2.0 + 0.64 * 5.0, max_relative = 1e-14);

        assert!(superposition(&[(w, a), (w, a)], z).is_err());
        assert!(superposition(&[(cx(1.0, 0.0), a), (w, b)], z).is_err());
    }

    #[test]
    fn even_cat_examples() {
        for (p, q) in [(1, 2), (1, 1), (2, 1)] {
            let k = p as f64 / q as f64;
            let lab = label(p, q, 2);
            let z: f64 = 0.7;
            let s = even_cat(&CoherentParams::new(lab, cx(z, 0.0)));
            let n = (1.0 + 2.0 * k * (2.0 * k + 1.0) * z.powi(4)).sqrt();
            assert!((s.amp[2] - 1.0 / n).norm() < 1e-15);
            assert!(s.amp[1].norm() == 0.0);
            assert!((s.amp[0] - (2.0 * k * (2.0 * k + 1.0)).sqrt() * z * z / n).norm() < 1e-15);

            let s = even_cat(&CoherentParams::new(lab, cx(2f64.sqrt(), 0.0)));
            let d = 4.0 * k + 1.0;
            assert!((s.amp[2] - 1.0 / d).norm() < 1e-14);
            assert!((s.amp[0] - (8.0 * k * (2.0 * k + 1.0)).sqrt() / d).norm() < 1e-14);
        }
        let lab = label(1, 1, 5);
        assert_eq!(even_cat(&CoherentParams::new(lab, Complex64::zero())), BlockState::reference(lab));
    }

    #[test]
    fn y_form() {
        let lab = label(1, 1, 3);
        assert!(CoherentParams::from_y(lab, Complex64::zero()).is_err());
        let p = CoherentParams::from_y(lab, cx(0.0, 2.0)).unwrap();
        assert!((p.z - cx(0.0, -0.5)).norm() < 1e-16);
        assert_eq!(coherent_state_y(lab, Complex64::zero()), BlockState::basis(lab, 0).unwrap());
    }
}
