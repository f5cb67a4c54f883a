use trilinear::analytic::{
    diff_op, identity_check, ode_residual_cs, ode_residual_eigen, sample_points, to_poly, MeasureParams, Operator,
};
use trilinear::coherent::{coherent_state, eigen_residuals, CoherentParams};
use trilinear::dynamics::{eigensystem, EvolutionConfig};
use trilinear::{BlockState, Complex64, Error, SubspaceLabel};

use crate::output::{num, slug, Table};
use crate::{Failure, VerifyArgs};

struct Row {
    check: &'static str,
    l: usize,
    worst: f64,
    tol: f64,
}

impl Row {
    fn pass(&self) -> bool {
        self.worst <= self.tol
    }
}

struct Tolerances {
    moments: f64,
    quadrature_routes: f64,
    eigen: f64,
    ode: f64,
    intertwining: f64,
}

impl Tolerances {
    fn new(overall: Option<f64>) -> Self {
        match overall {
            Some(t) => Tolerances { moments: t, quadrature_routes: t, eigen: t, ode: t, intertwining: t },
            None => Tolerances { moments: 1e-8, quadrature_routes: 1e-10, eigen: 1e-10, ode: 1e-9, intertwining: 1e-11 },
        }
    }
}

fn test_state(label: SubspaceLabel) -> BlockState {
    let amp = (0..label.dim())
        .map(|n| Complex64::new((0.7 * n as f64 + 0.3).sin(), (1.3 * n as f64).cos()))
        .collect();
    BlockState::from_amplitudes(label, amp).and_then(BlockState::normalized).expect("nonzero test state")
}

fn checks_for(label: SubspaceLabel, tol: &Tolerances) -> Result<Vec<Row>, Failure> {
    let l = label.l;
    let mut rows = Vec::new();

    let mp = MeasureParams { tolerance: tol.quadrature_routes, ..MeasureParams::new(label) };
    let worst = match identity_check(&mp) {
        Ok(dev) => dev.into_iter().fold(0.0, f64::max),
        Err(Error::Quadrature { deviation, .. }) => deviation.max(f64::MIN_POSITIVE) / tol.quadrature_routes * tol.moments,
        Err(e) => return Err(e.into()),
    };
    rows.push(Row { check: "identity-moments", l, worst, tol: tol.moments });

    let zs = [Complex64::new(0.3, 0.0), Complex64::new(1.0, 0.5), Complex64::new(0.0, 3.0), Complex64::new(10.0, 0.0)];
    let worst = zs
        .iter()
        .flat_map(|&z| eigen_residuals(&CoherentParams::new(label, z)))
        .fold(0.0, f64::max);
    rows.push(Row { check: "eigen-residuals", l, worst, tol: tol.eigen });

    let y0s = [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.5), Complex64::new(2.0, -1.0)];
    let worst = y0s
        .iter()
        .map(|&y0| ode_residual_cs(y0, label, &sample_points(label, y0)))
        .fold(0.0, f64::max);
    rows.push(Row { check: "ode-coherent", l, worst, tol: tol.ode });

    let kappa = Complex64::new(0.0, 1.0);
    let sys = eigensystem(&EvolutionConfig::new(label, kappa))?;
    let pts = sample_points(label, Complex64::new(0.0, 0.0));
    let mut worst = 0.0f64;
    for (nu, v) in sys.values.iter().zip(&sys.vectors) {
        worst = worst.max(ode_residual_eigen(*nu, v, label, kappa, &pts)?);
    }
    rows.push(Row { check: "ode-eigen", l, worst, tol: tol.ode });

    let mut worst = 0.0f64;
    for f in [test_state(label), coherent_state(&CoherentParams::new(label, Complex64::new(0.8, -0.6)))] {
        for op in Operator::ALL {
            let lhs = diff_op(op, &to_poly(&f));
            let rhs = to_poly(&op.apply(&f));
            let scale = rhs.coeff.iter().map(|c| c.norm()).fold(f64::MIN_POSITIVE, f64::max);
            let err = lhs.coeff.iter().zip(&rhs.coeff).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
        }
    }
    rows.push(Row { check: "intertwining", l, worst, tol: tol.intertwining });
    Ok(rows)
}

pub fn run(a: &VerifyArgs) -> Result<(), Failure> {
    if let Some(t) = a.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    let tol = Tolerances::new(a.tol);
    let mut rows = Vec::new();
    for &l in &a.l {
        rows.extend(checks_for(SubspaceLabel::new(a.k, l), &tol)?);
    }

    println!("{:<18} {:>4} {:>12} {:>12}  status", "check", "L", "worst", "tolerance");
    for r in &rows {
        println!(
            "{:<18} {:>4} {:>12.3e} {:>12.3e}  {}",
            r.check,
            r.l,
            r.worst,
            r.tol,
            if r.pass() { "ok" } else { "FAIL" }
        );
    }

    let ls = a.l.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
    let tol_desc = a.tol.map_or("default".to_string(), num);
    let mut t = Table::new(format!("trilinear verify k={} L={ls} tol={tol_desc}", a.k), &["check", "L", "worst", "tolerance", "pass"]);
    for r in &rows {
        t.rows.push(vec![r.check.to_string(), r.l.to_string(), num(r.worst), num(r.tol), r.pass().to_string()]);
    }
    let file = format!("verify_k{}_L{}.csv", slug(&a.k.to_string()), slug(&ls));
    if let Some(p) = t.write(a.out.as_deref(), &file)? {
        eprintln!("wrote {}", p.display());
    }

    let offender = rows
        .iter()
        .filter(|r| !r.pass())
        .max_by(|x, y| (x.worst / x.tol).total_cmp(&(y.worst / y.tol)));
    match offender {
        None => Ok(()),
        Some(r) => Err(Failure::Numeric(format!(
            "worst offender: {} at L={}: {:e} exceeds {:e}",
            r.check, r.l, r.worst, r.tol
        ))),
    }
}
