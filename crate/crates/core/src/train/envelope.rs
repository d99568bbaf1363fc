use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundEnvelope {
    pub kappa: f64,
    pub c_env: f64,
    /// Parameter box bound `B`.
    pub bound: f64,
    pub d_theta: usize,
}

/// `C [ (1 + d ln(B sqrt M))^{2 kappa + 1/2} / sqrt M + d sqrt(ln P) / sqrt P ]`.
/// `m` and `p` are real so the formula can be probed between sample counts.
pub fn theoretical_envelope(env: &BoundEnvelope, m: f64, p: f64) -> Result<f64> {
    if !(env.kappa >= 0.0 && env.c_env > 0.0 && env.bound > 0.0 && env.d_theta > 0) {
        return Err(Error::invalid("envelope constants must be positive"));
    }
    let arg = env.bound * m.sqrt();
    if arg <= 1.0 {
        return Err(Error::OutOfRegime(format!("B sqrt(M) = {arg} <= 1")));
    }
    if p < 1.0 {
        return Err(Error::OutOfRegime("P must be at least 1".into()));
    }
    let d = env.d_theta as f64;
    let sample_term = (1.0 + d * arg.ln()).powf(2.0 * env.kappa + 0.5) / m.sqrt();
    let point_term = d * p.ln().sqrt() / p.sqrt();
    Ok(env.c_env * (sample_term + point_term))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn env(kappa: f64) -> BoundEnvelope {
        BoundEnvelope {
            kappa,
            c_env: 1.0,
            bound: 1.0,
            d_theta: 10,
        }
    }

    #[test]
    fn direct_value() {
        let v = theoretical_envelope(&env(1.0), E * E, E * E).unwrap();
        let want = 11f64.powf(2.5) / E + 10.0 * 2f64.sqrt() / E;
        assert!((v - want).abs() < 1e-12 * want);
    }

    #[test]
    fn kappa_zero_exponent() {
        let v = theoretical_envelope(&env(0.0), 100.0, 1.0).unwrap();
        let want = (1.0 + 10.0 * 10f64.ln()).sqrt() / 10.0;
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn refuses_small_argument() {
        let e = BoundEnvelope {
            bound: 0.5,
            ..env(1.0)
        };
        assert!(matches!(
            theoretical_envelope(&e, 4.0, 10.0),
            Err(Error::OutOfRegime(_))
        ));
        assert!(theoretical_envelope(&e, 5.0, 10.0).is_ok());
    }

    #[test]
    fn decreasing_where_asymptotic() {
        let e = env(0.5);
        let mut prev = f64::INFINITY;
        for m in [1e6, 4e6, 1.6e7, 6.4e7] {
            let v = theoretical_envelope(&e, m, 1e9).unwrap();
            assert!(v < prev);
            prev = v;
        }
        let mut prev = f64::INFINITY;
        for p in [100.0, 1000.0, 10_000.0] {
            let v = theoretical_envelope(&e, 100.0, p).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }
}
