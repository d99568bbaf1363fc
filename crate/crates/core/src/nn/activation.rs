use std::fmt;
use std::str::FromStr;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Activation {
    /// `max(0, x)`
    Sigma1,
    /// `max(0, x)^2`
    Sigma2,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigma1 => z.max(0.0),
            Activation::Sigma2 => {
                let r = z.max(0.0);
                r * r
            }
            Activation::Identity => z,
        }
    }

    /// First derivative with the `[z > 0]` kink convention.
    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Sigma1 => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigma2 => 2.0 * z.max(0.0),
            Activation::Identity => 1.0,
        }
    }

    /// Second derivative; zero for `sigma1` away from the kink.
    #[inline]
    pub fn second_derivative(self, z: f64) -> f64 {
        match self {
            Activation::Sigma2 if z > 0.0 => 2.0,
            _ => 0.0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Activation::Sigma1 => "sigma1",
            Activation::Sigma2 => "sigma2",
            Activation::Identity => "identity",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sigma1" | "relu" => Ok(Activation::Sigma1),
            "sigma2" | "requ" => Ok(Activation::Sigma2),
            "identity" | "linear" => Ok(Activation::Identity),
            other => Err(Error::InvalidSpec(format!("unknown activation `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activation_values() {
        assert_eq!(Activation::Sigma1.apply(-3.0), 0.0);
        assert_eq!(Activation::Sigma1.apply(2.5), 2.5);
        assert_eq!(Activation::Sigma2.apply(2.0), 4.0);
        assert_eq!(Activation::Sigma2.apply(-1.0), 0.0);
        assert_eq!(Activation::Identity.apply(-1.5), -1.5);
    }

    #[test]
    fn kink_convention() {
        assert_eq!(Activation::Sigma1.derivative(0.0), 0.0);
        assert_eq!(Activation::Sigma2.second_derivative(0.0), 0.0);
        assert_eq!(Activation::Sigma2.second_derivative(1e-9), 2.0);
        assert_eq!(Activation::Sigma2.derivative(3.0), 6.0);
    }

    #[test]
    fn tags_round_trip() {
        for a in [Activation::Sigma1, Activation::Sigma2, Activation::Identity] {
            assert_eq!(a.tag().parse::<Activation>().unwrap(), a);
        }
        assert!("tanh".parse::<Activation>().is_err());
    }
}
