use trilinear::coherent::{coherent_state, CoherentParams};
use trilinear::dynamics::{eigensystem, transfer_efficiency, EvolutionConfig, ScanSpec};
use trilinear::statistics::{number_stats_curve, photon_distribution, purity_curve};
use trilinear::{BlockState, Complex64, SubspaceLabel};

use crate::output::{num, slug, Table};
use crate::parse::{grid, Spacing};
use crate::{CouplingArgs, EfficiencyArgs, EvolveArgs, Failure, Figure, FigureArgs, StateArgs};

fn report(path: Option<std::path::PathBuf>) {
    if let Some(p) = path {
        eprintln!("wrote {}", p.display());
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

pub fn state(a: &StateArgs) -> Result<(), Failure> {
    let label = SubspaceLabel::new(a.k, a.l);
    let s = coherent_state(&CoherentParams::new(label, a.z));
    let z = fmt_complex(a.z);
    let mut t = Table::new(format!("trilinear state k={} L={} z={z}", a.k, a.l), &["n", "re_amp", "im_amp", "prob"]);
    for (n, amp) in s.amp.iter().enumerate() {
        t.rows.push(vec![n.to_string(), num(amp.re), num(amp.im), num(amp.norm_sqr())]);
    }
    let name = format!("state_k{}_L{}_z{}.csv", slug(&a.k.to_string()), a.l, slug(&z));
    report(t.write(a.out.as_deref(), &name)?);
    Ok(())
}

fn figure_grid(a: &FigureArgs) -> Result<Vec<f64>, Failure> {
    if !a.z.is_empty() {
        if let Some(z) = a.z.iter().find(|z| !(**z >= 0.0 && z.is_finite())) {
            return Err(Failure::Usage(format!("|z| values must be finite and nonnegative, got {z}")));
        }
        return Ok(a.z.clone());
    }
    let lo = a.z_min.unwrap_or(match a.spacing {
        Spacing::Linear => a.z_max / a.steps.max(1) as f64,
        Spacing::Log => a.z_max * 1e-3,
    });
    grid(lo, a.z_max, a.steps, a.spacing).map_err(Failure::Usage)
}

fn spacing_name(s: Spacing) -> &'static str {
    match s {
        Spacing::Linear => "linear",
        Spacing::Log => "log",
    }
}

fn single_l(a: &FigureArgs) -> Result<usize, Failure> {
    match a.l.as_slice() {
        [l] => Ok(*l),
        _ => Err(Failure::Usage("this figure takes a single --L".into())),
    }
}

pub fn figure(a: &FigureArgs) -> Result<(), Failure> {
    let zs = figure_grid(a)?;
    let ls = a.l.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
    let config = |name: &str| {
        let grid_desc = if a.z.is_empty() {
            format!("z_min={} z_max={} steps={} spacing={}", num(zs[0]), num(a.z_max), a.steps, spacing_name(a.spacing))
        } else {
            format!("z={}", a.z.iter().map(|z| z.to_string()).collect::<Vec<_>>().join(","))
        };
        format!("trilinear figure {name} k={} L={ls} {grid_desc}", a.k)
    };
    let (table, name) = match a.which {
        Figure::Purity => {
            let header: Vec<String> =
                std::iter::once("z_abs".to_string()).chain(a.l.iter().map(|l| format!("purity_L{l}"))).collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut t = Table::new(config("purity"), &header);
            let curves: Vec<Vec<f64>> = a.l.iter().map(|&l| purity_curve(SubspaceLabel::new(a.k, l), &zs)).collect();
            for (i, z) in zs.iter().enumerate() {
                t.rows.push(std::iter::once(num(*z)).chain(curves.iter().map(|c| num(c[i]))).collect());
            }
            (t, "purity")
        }
        Figure::PhotonDist => {
            let l = single_l(a)?;
            let label = SubspaceLabel::new(a.k, l);
            let header: Vec<String> =
                std::iter::once("n".to_string()).chain(zs.iter().map(|z| format!("P_z{}", num(*z)))).collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut t = Table::new(config("photon-dist"), &header);
            let dists: Vec<Vec<f64>> = zs
                .iter()
                .map(|&z| photon_distribution(&CoherentParams::new(label, Complex64::new(z, 0.0))))
                .collect();
            for n in 0..=l {
                t.rows.push(std::iter::once(n.to_string()).chain(dists.iter().map(|d| num(d[n]))).collect());
            }
            (t, "photon-dist")
        }
        Figure::NumberStats => {
            let l = single_l(a)?;
            let mut t = Table::new(config("number-stats"), &["z_abs", "mean", "variance"]);
            for (z, (m, v)) in zs.iter().zip(number_stats_curve(SubspaceLabel::new(a.k, l), &zs)) {
                t.rows.push(vec![num(*z), num(m), num(v)]);
            }
            (t, "number-stats")
        }
    };
    let file = format!("figure_{name}_k{}_L{}.csv", slug(&a.k.to_string()), slug(&ls));
    report(table.write(a.out.as_deref(), &file)?);
    Ok(())
}

fn coupling(c: &CouplingArgs) -> Result<Complex64, Failure> {
    if !(c.kappa > 0.0 && c.kappa.is_finite()) || !c.kappa_phase.is_finite() {
        return Err(Failure::Usage(format!("need finite |κ| > 0, got {}", c.kappa)));
    }
    Ok(Complex64::from_polar(c.kappa, c.kappa_phase))
}

fn pump_purity(s: &BlockState) -> f64 {
    1.0 - s.amp.iter().map(|a| a.norm_sqr().powi(2)).sum::<f64>()
}

pub fn evolve(a: &EvolveArgs) -> Result<(), Failure> {
    let label = SubspaceLabel::new(a.k, a.l);
    let kappa = coupling(&a.coupling)?;
    if !(a.t_max >= 0.0 && a.t_max.is_finite()) {
        return Err(Failure::Usage(format!("--t-max must be finite and nonnegative, got {}", a.t_max)));
    }
    let times = grid(0.0, a.t_max, a.t_steps, Spacing::Linear).map_err(|e| Failure::Usage(e.replace("--steps", "--t-steps")))?;
    let sys = eigensystem(&EvolutionConfig::new(label, kappa))?;
    let mut header = vec!["t".to_string(), "mean_Na".to_string(), "purity".to_string()];
    if a.amplitudes {
        for n in 0..=a.l {
            header.push(format!("re_amp_{n}"));
            header.push(format!("im_amp_{n}"));
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(
        format!(
            "trilinear evolve k={} L={} kappa={} kappa_phase={} t_max={} t_steps={} amplitudes={}",
            a.k,
            a.l,
            num(a.coupling.kappa),
            num(a.coupling.kappa_phase),
            num(a.t_max),
            a.t_steps,
            a.amplitudes
        ),
        &header,
    );
    let psi0 = BlockState::reference(label);
    for &time in &times {
        let s = sys.evolve(&psi0, time)?;
        let mean: f64 = s.amp.iter().enumerate().map(|(n, x)| n as f64 * x.norm_sqr()).sum();
        let mut row = vec![num(time), num(mean), num(pump_purity(&s))];
        if a.amplitudes {
            for x in &s.amp {
                row.push(num(x.re));
                row.push(num(x.im));
            }
        }
        t.rows.push(row);
    }
    let file = format!("evolve_k{}_L{}.csv", slug(&a.k.to_string()), a.l);
    report(t.write(a.out.as_deref(), &file)?);
    Ok(())
}

pub fn efficiency(a: &EfficiencyArgs) -> Result<(), Failure> {
    let label = SubspaceLabel::new(a.k, a.l);
    let cfg = EvolutionConfig::new(label, coupling(&a.coupling)?);
    let spec = ScanSpec::default();
    let e = transfer_efficiency(&cfg, &spec)?;
    println!("xi = {}", num(e.xi));
    println!("min_mean_Na = {}", num(e.min_mean_na));
    println!("t_min = {}", num(e.t_min));
    println!("window = [0, {}]", num(e.window));
    println!("refine_tol = {}", num(spec.refine_tol));
    println!("approximate = {}", e.approximate);
    Ok(())
}
