//! Probability vectors over linearly ordered labels, and their JSON file format.

use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{parse_rational, to_f64, Rational};
use crate::error::{Error, Result};

/// Exact positive probabilities summing to one. Index order is the element order
/// `x_1 < x_2 < ... < x_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityVector {
    probs: Vec<Rational>,
    labels: Vec<String>,
}

impl ProbabilityVector {
    pub fn new(labels: Vec<String>, probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no elements".into()));
        }
        if labels.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_positive()) {
            return Err(Error::InvalidDistribution(format!(
                "probability of {} is {p}, must be positive",
                labels[i]
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}, not 1")));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidDistribution(format!("duplicate label {dup:?}")));
        }
        Ok(ProbabilityVector { probs, labels })
    }

    /// Builds a vector with default labels `x1..xn`.
    pub fn from_probs(probs: Vec<Rational>) -> Result<Self> {
        let labels = (1..=probs.len()).map(|i| format!("x{i}")).collect();
        Self::new(labels, probs)
    }

    /// Normalizes positive integer weights.
    pub fn from_weights(weights: &[BigInt]) -> Result<Self> {
        let total: BigInt = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::from_probs(weights.iter().map(|w| Rational::new(w.clone(), total.clone())).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("uniform over zero elements".into()));
        }
        Self::from_weights(&vec![BigInt::one(); n])
    }

    /// `(1/2, 1/4, ..., 2^-(n-1), 2^-(n-1))`.
    pub fn dyadic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("dyadic over zero elements".into()));
        }
        let mut probs: Vec<Rational> = (1..n)
            .map(|i| Rational::new(BigInt::one(), BigInt::one() << i))
            .collect();
        probs.push(Rational::new(BigInt::one(), BigInt::one() << (n - 1)));
        Self::from_probs(probs)
    }

    /// Truncated geometric weights `p (1-p)^i`, `i < n`, renormalized.
    pub fn geometric(n: usize, p: &Rational) -> Result<Self> {
        if n == 0 || !p.is_positive() || *p >= Rational::one() {
            return Err(Error::InvalidDistribution("geometric needs n >= 1 and 0 < p < 1".into()));
        }
        let q = Rational::one() - p;
        let mut w = p.clone();
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            weights.push(w.clone());
            w *= &q;
        }
        let total: Rational = weights.iter().sum();
        Self::from_probs(weights.into_iter().map(|x| x / &total).collect())
    }

    /// Parses a generator spec: `uniform:N`, `dyadic:N`, `geometric:N,P`, `point`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("bad distribution spec {spec:?}: {msg}"));
        let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
        let parse_n = |s: &str| -> Result<usize> {
            let s = s.trim();
            if let Some(exp) = s.strip_prefix("2^") {
                let e: u32 = exp.parse().map_err(|_| bad("expected integer exponent"))?;
                return 1usize.checked_shl(e).ok_or_else(|| bad("too large"));
            }
            s.parse().map_err(|_| bad("expected integer"))
        };
        match kind {
            "uniform" => Self::uniform(parse_n(args)?),
            "dyadic" => Self::dyadic(parse_n(args)?),
            "point" => Self::uniform(1),
            "geometric" => {
                let (n, p) = args.split_once(',').ok_or_else(|| bad("expected N,P"))?;
                Self::geometric(parse_n(n)?, &parse_rational(p)?)
            }
            _ => Err(bad("unknown generator")),
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> &Rational {
        &self.probs[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        self.probs.iter().map(to_f64).collect()
    }

    /// Least common multiple of all denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()))
    }

    /// Draws an element index with probability `prob(i)` from a uniform `u in [0,1)`.
    pub fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, p) in self.probs_f64().iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.len() - 1
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DistributionFile = serde_json::from_str(text)?;
        let probs = file
            .probs
            .iter()
            .map(ProbEntry::to_rational)
            .collect::<Result<Vec<_>>>()?;
        let labels = match file.labels {
            Some(l) => l,
            None => (1..=probs.len()).map(|i| format!("x{i}")).collect(),
        };
        Self::new(labels, probs)
    }

    pub fn to_json(&self) -> String {
        let file = DistributionFile {
            labels: Some(self.labels.clone()),
            probs: self
                .probs
                .iter()
                .map(|p| ProbEntry::Fraction { num: p.numer().to_string(), den: p.denom().to_string() })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("distribution serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    probs: Vec<ProbEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ProbEntry {
    Fraction { num: String, den: String },
    Decimal(String),
}

impl ProbEntry {
    fn to_rational(&self) -> Result<Rational> {
        match self {
            ProbEntry::Fraction { num, den } => {
                let n: BigInt = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidDistribution(format!("bad numerator {num:?}")))?;
                let d: BigInt = den
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidDistribution(format!("bad denominator {den:?}")))?;
                if !d.is_positive() {
                    return Err(Error::InvalidDistribution(format!("denominator {den} must be positive")));
                }
                Ok(Rational::new(n, d))
            }
            ProbEntry::Decimal(s) => parse_rational(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rational;

    #[test]
    fn rejects_bad_vectors() {
        assert!(ProbabilityVector::from_probs(vec![rational(1, 2), rational(1, 3)]).is_err());
        assert!(ProbabilityVector::from_probs(vec![rational(1, 1), rational(0, 1)]).is_err());
        assert!(ProbabilityVector::from_probs(vec![rational(3, 2), rational(-1, 2)]).is_err());
        assert!(ProbabilityVector::new(vec!["a".into(), "a".into()], vec![rational(1, 2), rational(1, 2)]).is_err());
        assert!(ProbabilityVector::from_probs(vec![]).is_err());
    }

    #[test]
    fn json_fraction_and_decimal_forms() {
        let a = ProbabilityVector::from_json(
            r#"{"labels":["a","b","c"],"probs":[{"num":"1","den":"2"},{"num":"1","den":"4"},{"num":"2","den":"8"}]}"#,
        )
        .unwrap();
        let b = ProbabilityVector::from_json(r#"{"labels":["a","b","c"],"probs":["0.5","0.25","0.25"]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(ProbabilityVector::from_json(&a.to_json()).unwrap(), a);
        assert!(ProbabilityVector::from_json(r#"{"probs":["0.5","0.4"]}"#).is_err());
        assert!(ProbabilityVector::from_json(r#"{"probs":[{"num":"1","den":"-2"},{"num":"3","den":"2"}]}"#).is_err());
    }

    #[test]
    fn generators() {
        let d = ProbabilityVector::from_spec("dyadic:4").unwrap();
        assert_eq!(d.probs(), &[rational(1, 2), rational(1, 4), rational(1, 8), rational(1, 8)]);
        assert_eq!(ProbabilityVector::from_spec("uniform:2^4").unwrap().len(), 16);
        let g = ProbabilityVector::from_spec("geometric:3,1/2").unwrap();
        assert_eq!(g.probs(), &[rational(4, 7), rational(2, 7), rational(1, 7)]);
        assert!(ProbabilityVector::from_spec("zipf:3").is_err());
        assert_eq!(ProbabilityVector::from_spec("point").unwrap().len(), 1);
    }
}
