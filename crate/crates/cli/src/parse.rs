use trilinear::{BargmannIndex, Complex64};

pub fn parse_k(s: &str) -> Result<BargmannIndex, String> {
    s.parse::<BargmannIndex>().map_err(|e| e.to_string())
}

/// Accepts `x`, `yi`, `x+yi` and `x-yi` (also with `j`), e.g. `0.5`,
/// `-2i`, `1.5-0.25i`, `1e-3+2e-3i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex number {s:?}: expected x, yi or x+yi");
    let real = |p: &str| p.parse::<f64>().map_err(|_| bad());
    let imag = |p: &str| match p {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        p => p.parse::<f64>().map_err(|_| bad()),
    };
    let z = match t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        None => Complex64::new(real(&t)?, 0.0),
        Some(body) => {
            // split at the last sign that is not the leading sign or an exponent sign
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
            match split {
                Some(i) => Complex64::new(real(&body[..i])?, imag(&body[i..])?),
                None => Complex64::new(0.0, imag(body)?),
            }
        }
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

/// `steps` points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, steps: usize, spacing: Spacing) -> Result<Vec<f64>, String> {
    if steps == 0 {
        return Err("--steps must be at least 1".into());
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi || lo < 0.0 {
        return Err(format!("need 0 ≤ z-min ≤ z-max, got {lo} and {hi}"));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let frac = |i: usize| i as f64 / (steps - 1) as f64;
    match spacing {
        Spacing::Linear => Ok((0..steps).map(|i| lo + (hi - lo) * frac(i)).collect()),
        Spacing::Log => {
            if lo <= 0.0 {
                return Err("log spacing needs z-min > 0".into());
            }
            Ok((0..steps).map(|i| lo * (hi / lo).powf(frac(i))).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("-2i").unwrap(), c(0.0, -2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("1.5-0.25i").unwrap(), c(1.5, -0.25));
        assert_eq!(parse_complex("-1e-3+2E-3j").unwrap(), c(-1e-3, 2e-3));
        assert_eq!(parse_complex("3 + i").unwrap(), c(3.0, 1.0));
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("nan").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(grid(0.0, 1.0, 3, Spacing::Linear).unwrap(), vec![0.0, 0.5, 1.0]);
        let g = grid(1e-2, 1.0, 3, Spacing::Log).unwrap();
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert!(grid(0.0, 1.0, 3, Spacing::Log).is_err());
        assert!(grid(0.0, 1.0, 0, Spacing::Linear).is_err());
        assert!(grid(2.0, 1.0, 3, Spacing::Linear).is_err());
    }
}
